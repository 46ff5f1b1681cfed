from fractions import Fraction as F

import pytest
from hypothesis import given

from mabisim import ModelSyntaxError, gen_random_ma, parse_distribution, parse_model, serialize_model
from mabisim.corpus import corpus

from strategies import seeds

TEXT = """\
ma tiny
states: s, t1, t2
init: s
ptrans: s --a--> { 1/2: t1, 1/2: t2 }   # a fair coin
mtrans: t1 --3--> s
ptrans: t2 --tau--> t1
"""


def test_parse_tiny():
    ma = parse_model(TEXT)
    assert ma.name == "tiny" and ma.states == ("s", "t1", "t2")
    assert ma.mtrans == (("t1", F(3), "s"),)
    (_, a, mu), _ = ma.ptrans
    assert str(a) == "a" and mu == parse_distribution("{1/2:t1,1/2:t2}")


def test_bare_name_is_dirac():
    assert parse_distribution("s'").is_dirac


@pytest.mark.parametrize("text, line", [
    ("states: s\nptrans: s --a--> { 1/2: s }\n", 2),
    ("states: s\nmtrans: s --0--> s\n", 2),
    ("states: s\nmtrans: s --x--> s\n", 2),
    ("states: s\nptrans: s --a--> u\n", 2),
    ("states: s\n\nfoo: bar\n", 3),
    ("ptrans: s --a--> s\n", 1),
    ("states: s\nptrans s --a--> s\n", 2),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ModelSyntaxError) as info:
        parse_model(text)
    assert info.value.line == line


def test_corpus_roundtrips():
    for e in corpus():
        again = parse_model(e.text)
        assert again == e.model or serialize_model(again) == e.text


@given(seeds)
def test_random_models_roundtrip(seed):
    ma = gen_random_ma(seed, tau_cycles=seed % 2 == 0)
    again = parse_model(serialize_model(ma))
    assert serialize_model(again) == serialize_model(ma)
    assert again.states == ma.states and set(again.ptrans) == set(ma.ptrans)
