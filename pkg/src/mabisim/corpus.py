"""Bundled example models with the verdicts they are known to produce.

All rates use the unit lambda = 1. Every entry carries at least one claim;
replaying the corpus re-runs each claim and compares outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from .composition import parallel_compose, restrict_init
from .equivalence import (DEFAULT_BOUNDS, BudgetExceeded, Outcome, Relation, RelationKind, SearchBounds,
                          check_ma)
from .model import Distribution, MarkovAutomaton, ModelError
from .semantics import build_semantics
from .textformat import parse_distribution, parse_model, serialize_model

RACE = """\
ma race
states: s, s', t, t1, t2, r, r1, r2
init: s
# s: delay 2, then a fair internal coin
mtrans: s --2--> s'
ptrans: s' --tau--> { 1/2: t1, 1/2: t2 }
# t: a race between two rate-1 delays
mtrans: t --1--> t1
mtrans: t --1--> t2
# r: the coin first, then delay 2
ptrans: r --tau--> { 1/2: r1, 1/2: r2 }
mtrans: r1 --2--> t1
mtrans: r2 --2--> t2
# the two outcomes are observably different
ptrans: t1 --a--> t1
ptrans: t2 --b--> t2
"""

VISIBLE_DELAY = """\
ma visible_delay
states: s0, s1, s3, s4
init: s0
ptrans: s0 --alpha--> s1
mtrans: s0 --1--> s3
mtrans: s0 --2--> s4
"""

LATE_ONLY = """\
ma late_only
states: t0, t3, t4, t0', s2, s1, s3, s4
init: t0
ptrans: t0 --tau--> { 1/3: t3, 2/3: t4 }
ptrans: t3 --alpha--> s1
mtrans: t3 --3--> s3
ptrans: t4 --alpha--> s1
mtrans: t4 --3--> s4
ptrans: t0' --alpha--> s1
ptrans: t0' --tau--> s2
ptrans: s2 --alpha--> s1
mtrans: s2 --1--> s3
mtrans: s2 --2--> s4
ptrans: s3 --c--> s3
ptrans: s4 --d--> s4
"""

SPLIT = """\
ma split
states: s1, s2, s3, s4, t1, t2, t3, t4
init: s1
ptrans: s1 --a1--> t1
ptrans: s1 --a2--> t2
ptrans: s2 --a3--> t3
ptrans: s2 --a4--> t4
ptrans: s3 --a1--> t1
ptrans: s3 --a3--> t3
ptrans: s4 --a2--> t2
ptrans: s4 --a4--> t4
"""

TAU_CHAIN = """\
ma tau_chain
states: s, s', s'', r, r1, r2, t1, t2
init: s
mtrans: s --2--> s'
ptrans: s' --tau--> s''
ptrans: s'' --tau--> { 1/2: t1, 1/2: t2 }
ptrans: r --tau--> { 1/2: r1, 1/2: r2 }
mtrans: r1 --2--> t1
mtrans: r2 --2--> t2
ptrans: t1 --a--> t1
ptrans: t2 --b--> t2
"""

SIMULATION = """\
ma simulation
states: s0, s0a, s', t, t1, t2, r, r1, r2
init: s0
mtrans: s0 --2--> s'
ptrans: s0 --alpha--> s0a
ptrans: s' --tau--> { 1/2: t1, 1/2: t2 }
mtrans: t --1--> t1
mtrans: t --1--> t2
ptrans: r --tau--> { 1/2: r1, 1/2: r2 }
mtrans: r1 --2--> t1
mtrans: r2 --2--> t2
ptrans: t1 --a--> t1
ptrans: t2 --b--> t2
"""

DIVERGENCE = """\
ma divergence
states: s, r, t
init: s
ptrans: r --tau--> r
mtrans: t --1--> t
"""

KERNEL = """\
ma kernel
states: s, r, s1, s2, s3, d
init: s
ptrans: s --a--> s1
ptrans: s --a--> s2
ptrans: s --a--> s3
ptrans: r --a--> s1
ptrans: r --a--> s3
ptrans: s2 --b--> d
ptrans: s3 --b--> d
ptrans: s3 --c--> d
"""


@dataclass(frozen=True)
class Claim:
    """One documented fact about an entry.

    A verdict claim compares ``lhs`` and ``rhs`` (state names or
    distribution literals). A structure claim lists the exact outgoing
    transitions of state ``lhs`` in the given semantics, as
    ``src --label--> {p:t,...}`` strings.
    """

    semantics: str
    relation: Optional[RelationKind]
    lhs: str
    rhs: str = ""
    expected: Optional[Outcome] = None
    transitions: Tuple[str, ...] = ()
    note: str = ""

    @property
    def is_structural(self) -> bool:
        return self.relation is None

    def describe(self) -> str:
        if self.is_structural:
            return f"{self.semantics} transitions of {self.lhs}"
        sym = "~" if self.relation.relation is not Relation.SIM else "<="
        return f"{self.semantics} {self.relation}: {self.lhs} {sym} {self.rhs} is {self.expected.value}"


@dataclass
class CorpusEntry:
    name: str
    model: MarkovAutomaton
    claims: List[Claim] = field(default_factory=list)
    text: str = ""

    def __post_init__(self):
        if not self.claims:
            raise ModelError(f"corpus entry {self.name!r} has no claims")
        if not self.text:
            self.text = serialize_model(self.model)


@dataclass
class ClaimResult:
    entry: str
    claim: Claim
    passed: bool
    observed: str
    wall_time_ms: float = 0.0

    def line(self) -> str:
        return f"{'pass' if self.passed else 'FAIL'} [{self.entry}] {self.claim.describe()} (observed {self.observed})"


def _v(semantics, relation, lhs, rhs, outcome, note="", div=False) -> Claim:
    return Claim(semantics, RelationKind(Relation(relation), div), lhs, rhs,
                 Outcome.EQUIVALENT if outcome else Outcome.DISTINGUISHED, note=note)


def _s(semantics, state, *transitions, note="") -> Claim:
    return Claim(semantics, None, state, transitions=tuple(sorted(transitions)), note=note)


EQ, NEQ = True, False


def _divergence_composed() -> MarkovAutomaton:
    base = parse_model(DIVERGENCE)
    return parallel_compose(base, restrict_init(base, "t"), name="divergence_composed")


def _self_composed() -> MarkovAutomaton:
    base = parse_model(DIVERGENCE)
    return parallel_compose(restrict_init(base, "t"), restrict_init(base, "t"), name="delay_pair")


def corpus() -> List[CorpusEntry]:
    entries = [
        CorpusEntry("race", parse_model(RACE), [
            _v("early", "bisim", "s", "t", EQ, "delay-then-coin equals the race"),
            _v("early", "bisim", "t", "r", NEQ, "coin-then-delay is observable early"),
            _v("early", "bisim", "s", "r", NEQ),
            _v("late", "bisim", "s", "r", EQ),
            _v("late", "bisim", "t", "r", EQ),
            _v("late", "bisim", "s", "t", EQ),
            _v("late-strong", "bisim", "s", "r", EQ, "one strong tau step suffices here"),
            _v("early", "ehz", "s", "t", EQ),
            _v("early", "ehz", "t", "r", NEQ),
            _v("early", "dh", "s", "t", EQ),
            _v("early", "dh", "t", "r", NEQ),
            _v("early", "sim", "t", "r", EQ, "early race is simulated by coin-first"),
            _v("early", "sim", "r", "t", NEQ),
            _s("early", "t", "t --rate(2)--> {1/2:t1,1/2:t2}"),
            _s("late", "t", "t --tau--> {1/2:[t,t1],1/2:[t,t2]}"),
            _s("late", "[t,t1]", "[t,t1] --rate(2)--> {1:t1}"),
        ]),
        CorpusEntry("visible_delay", parse_model(VISIBLE_DELAY), [
            _s("early", "s0", "s0 --alpha--> {1:s1}", "s0 --rate(3)--> {1/3:s3,2/3:s4}"),
            _s("late", "s0", "s0 --alpha--> {1:s1}", "s0 --tau--> {1/3:[s0,s3],2/3:[s0,s4]}"),
            _s("late", "[s0,s3]", "[s0,s3] --alpha--> {1:s1}", "[s0,s3] --rate(3)--> {1:s3}"),
            _s("late", "[s0,s4]", "[s0,s4] --alpha--> {1:s1}", "[s0,s4] --rate(3)--> {1:s4}"),
            _v("late", "bisim", "s0", "s0", EQ),
        ]),
        CorpusEntry("late_only", parse_model(LATE_ONLY), [
            _v("late", "bisim", "t0", "t0'", EQ, "late semantics moves the race choice up front"),
            _v("early", "bisim", "t0", "t0'", NEQ),
        ]),
        CorpusEntry("split", parse_model(SPLIT), [
            _v("early", "bisim", "{1/2:s1,1/2:s2}", "{1/2:s3,1/2:s4}", NEQ,
               "half the mass may move to s1 alone"),
            _v("early", "ehz", "{1/2:s1,1/2:s2}", "{1/2:s3,1/2:s4}", NEQ),
            _v("early", "dh", "{1/2:s1,1/2:s2}", "{1/2:s3,1/2:s4}", NEQ),
        ]),
        CorpusEntry("tau_chain", parse_model(TAU_CHAIN), [
            _v("late", "bisim", "s", "r", EQ),
            _v("late-strong", "bisim", "s", "r", NEQ, "a single strong tau step stops at s''"),
        ]),
        CorpusEntry("simulation", parse_model(SIMULATION), [
            _v("early", "sim", "t", "s0", EQ),
            _v("late", "sim", "t", "s0", EQ),
            _v("late", "sim", "r", "s0", EQ),
            _v("early", "sim", "r", "s0", NEQ),
        ]),
        CorpusEntry("divergence", parse_model(DIVERGENCE), [
            _v("early", "bisim", "s", "r", EQ, "a tau loop is invisible to plain bisimulation"),
            _v("early", "bisim", "s", "r", NEQ, "divergence-sensitive", div=True),
            _v("early", "bisim", "r", "r", EQ, "both divergent", div=True),
        ]),
        CorpusEntry("divergence_composed", _divergence_composed(), [
            _v("early", "bisim", "s|t", "r|t", NEQ, "the tau loop blocks the delay in r|t"),
        ]),
        CorpusEntry("delay_pair", _self_composed(), [
            _s("early", "t|t", "t|t --rate(2)--> {1:t|t}", note="self-loop rates add"),
        ]),
        CorpusEntry("kernel", parse_model(KERNEL), [
            _v("early", "kernel", "s", "r", EQ),
            _v("early", "bisim", "s", "r", NEQ),
            _v("early", "sim", "s", "r", EQ),
            _v("early", "sim", "r", "s", EQ),
            _v("early", "sim", "s2", "s1", NEQ),
            _v("early", "sim", "s3", "s2", NEQ),
        ]),
    ]
    return entries


def entry(name: str) -> CorpusEntry:
    for e in corpus():
        if e.name == name:
            return e
    raise KeyError(name)


def dist_arg(text: str) -> Distribution:
    """State name or distribution literal."""
    return parse_distribution(text)


def transition_strings(ma: MarkovAutomaton, semantics, state) -> List[str]:
    m = build_semantics(ma, semantics)
    return sorted(f"{state} --{a}--> {mu.to_literal()}" for a, mu in m.out(state))


def _find_state(ma, semantics, name: str):
    m = build_semantics(ma, semantics)
    for s in m.states:
        if str(s) == name:
            return m, s
    raise ModelError(f"no state {name} in the {semantics} semantics")


def replay_claim(e: CorpusEntry, c: Claim, bounds: SearchBounds = DEFAULT_BOUNDS) -> ClaimResult:
    import time

    t0 = time.perf_counter()
    if c.is_structural:
        m, s = _find_state(e.model, c.semantics, c.lhs)
        got = tuple(sorted(f"{s} --{a}--> {mu.to_literal()}" for a, mu in m.out(s)))
        ok = got == c.transitions
        observed = "as listed" if ok else "; ".join(got)
    else:
        try:
            v = check_ma(e.model, c.semantics, c.relation, dist_arg(c.lhs), dist_arg(c.rhs), bounds)
            observed = v.outcome.value
            ok = v.outcome is c.expected
        except BudgetExceeded:
            observed, ok = "budget exceeded", False
    return ClaimResult(e.name, c, ok, observed, round((time.perf_counter() - t0) * 1000, 3))


def replay(entries: Optional[List[CorpusEntry]] = None, bounds: SearchBounds = DEFAULT_BOUNDS,
           on_result: Optional[Callable[[ClaimResult], None]] = None) -> List[ClaimResult]:
    results = []
    for e in entries if entries is not None else corpus():
        for c in e.claims:
            r = replay_claim(e, c, bounds)
            results.append(r)
            if on_result:
                on_result(r)
    return results
