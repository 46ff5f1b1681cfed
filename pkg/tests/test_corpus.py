import pytest

from mabisim import ModelError, Outcome, gen_random_ma, build_early
from mabisim.corpus import Claim, CorpusEntry, corpus, entry, replay, replay_claim

ALL = [(e, c) for e in corpus() for c in e.claims]


@pytest.mark.parametrize("e, c", ALL, ids=[f"{e.name}:{c.describe()}" for e, c in ALL])
def test_claim_holds(e, c):
    r = replay_claim(e, c)
    assert r.passed, r.line()


def test_names_are_descriptive_and_unique():
    names = [e.name for e in corpus()]
    assert len(set(names)) == len(names)
    assert not any(n.lower().startswith(("fig", "example", "ex")) for n in names)


def test_entry_without_claims_is_rejected():
    with pytest.raises(ModelError):
        CorpusEntry("empty", entry("race").model, [])


def test_replay_callback_sees_every_claim():
    seen = []
    results = replay([entry("split")], on_result=seen.append)
    assert seen == results and all(r.passed for r in results)
    assert results[0].line().startswith("pass [split]")


def test_failing_claim_is_reported():
    wrong = Claim("early", entry("race").claims[0].relation, "t", "r", Outcome.EQUIVALENT)
    r = replay_claim(entry("race"), wrong)
    assert not r.passed and r.observed == "distinguished"


def test_generator_is_deterministic():
    assert gen_random_ma(7) == gen_random_ma(7)
    assert len(gen_random_ma(0, max_states=1).states) == 1
    with pytest.raises(ValueError):
        gen_random_ma(0, max_states=0)


def test_generated_models_are_valid():
    for seed in range(500):
        ma = gen_random_ma(seed, tau_cycles=seed % 2 == 0)
        ma.validate()
        build_early(ma).validate()
