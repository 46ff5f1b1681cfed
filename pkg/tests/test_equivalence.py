from fractions import Fraction as F

import pytest

from mabisim import (TAU, BudgetExceeded, Caveat, Distribution, Mlts, ModelError, Outcome, Relation, RelationKind,
                     build_early, check_dh, check_ehz, check_kernel, check_ma, check_relation, check_weak_bisim,
                     check_weak_sim, visible)
from mabisim.corpus import entry

d = Distribution.dirac
A, B = visible("a"), visible("b")


def _m():
    # x and y differ only by an internal step, z can refuse b
    return Mlts(["x", "x1", "y", "z", "end"], [
        ("x", TAU, d("x1")), ("x1", A, d("end")), ("x1", B, d("end")),
        ("y", A, d("end")), ("y", B, d("end")),
        ("z", A, d("end")),
    ])


def test_internal_step_is_invisible():
    v = check_weak_bisim(_m(), "x", "y")
    assert v.outcome is Outcome.EQUIVALENT and v.caveat is Caveat.EXACT_ON_CORPUS_CLASS
    assert (d("x"), d("y")) in v.witness


def test_refusal_is_visible_and_explained():
    v = check_weak_bisim(_m(), "y", "z")
    assert not v
    assert v.counterexample["challenge"]["action"] == "b"


def test_simulation_is_directional():
    assert check_weak_sim(_m(), "z", "y")
    assert not check_weak_sim(_m(), "y", "z")
    assert not check_kernel(_m(), "y", "z")


@pytest.mark.parametrize("check", [check_weak_bisim, check_ehz, check_dh])
def test_engines_agree_on_small_model(check):
    m = _m()
    assert check(m, "x", "y").equivalent
    assert not check(m, "x", "z").equivalent


def test_ehz_compares_masses_first():
    v = check_ehz(_m(), Distribution({"x": F(1, 2)}), d("y"))
    assert not v and "mass" in v.counterexample["reason"]


def test_distributions_need_known_full_support():
    with pytest.raises(ModelError):
        check_weak_bisim(_m(), "nope", "y")
    with pytest.raises(ModelError):
        check_weak_bisim(_m(), Distribution({"x": F(1, 2)}), "y")


def test_divergence_sensitivity():
    m = Mlts(["s", "r"], [("r", TAU, d("r"))])
    assert check_weak_bisim(m, "s", "r")
    assert not check_weak_bisim(m, "s", "r", divergence_sensitive=True)
    assert check_weak_bisim(m, "r", "r", divergence_sensitive=True)


def test_relation_kind_from_strings():
    assert RelationKind("sim").relation is Relation.SIM
    assert str(RelationKind(Relation.BISIM, True)) == "bisim+div"
    with pytest.raises(ValueError):
        check_relation(_m(), RelationKind("ehz", True), "x", "y")


def test_budget_outcome():
    ma = entry("race").model
    with pytest.raises(BudgetExceeded):
        check_ma(ma, "early", "bisim", "s", "t", budget=1)


def test_verdict_json_shapes():
    ok = check_ma(entry("race").model, "early", "bisim", "s", "t").to_json()
    assert ok["outcome"] == "equivalent" and ok["witness"] and ok["bounds"] == {"grid_denominator": 4, "tau_depth": 3}
    bad = check_ma(entry("race").model, "early", "bisim", "t", "r").to_json()
    assert bad["outcome"] == "distinguished" and "pair" in bad["counterexample"]


def test_check_ma_rejects_pair_states():
    with pytest.raises(ModelError):
        check_ma(entry("race").model, "late", "bisim", "s", "[s,s']")


def test_weak_challenge_mode_agrees_on_corpus_pairs():
    m = build_early(entry("race").model)
    for lhs, rhs in (("s", "t"), ("t", "r")):
        assert (check_weak_bisim(m, lhs, rhs).outcome
                is check_weak_bisim(m, lhs, rhs, weak_challenges=True).outcome)
