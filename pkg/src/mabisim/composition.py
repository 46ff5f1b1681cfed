"""Parallel composition of Markov automata and a congruence test harness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

from .convergence import is_time_convergent
from .model import Q, Distribution, MarkovAutomaton, ModelError, compose_name, dist_product


def _alphabet(ma: MarkovAutomaton) -> set:
    labels = set(ma.actions)
    labels.update(a.label for _, a, _ in ma.ptrans if a.is_visible)
    return labels


def default_sync(m1: MarkovAutomaton, m2: MarkovAutomaton) -> frozenset:
    return frozenset(_alphabet(m1) & _alphabet(m2))


def parallel_compose(m1: MarkovAutomaton, m2: MarkovAutomaton, sync: Optional[Iterable[str]] = None,
                     name: Optional[str] = None) -> MarkovAutomaton:
    """Product automaton synchronising on ``sync`` and interleaving everything else.

    Markovian self-loops of the two sides merge into one self-loop whose rate
    is the sum; other Markovian edges interleave.
    """
    sync = default_sync(m1, m2) if sync is None else frozenset(sync)
    if "tau" in sync:
        raise ModelError("tau cannot be synchronised")
    for label in sorted(sync):
        for m in (m1, m2):
            if label not in _alphabet(m):
                raise ModelError(f"sync action {label!r} not in the alphabet of {m.name}")

    states = [compose_name(s1, s2) for s1 in m1.states for s2 in m2.states]
    ptrans = []
    for s1 in m1.states:
        for s2 in m2.states:
            src = compose_name(s1, s2)
            for a1, mu1 in m1.transitions_from(s1):
                if a1.is_visible and a1.label in sync:
                    for a2, mu2 in m2.transitions_from(s2):
                        if a2 == a1:
                            ptrans.append((src, a1, dist_product(mu1, mu2)))
                else:
                    ptrans.append((src, a1, dist_product(mu1, Distribution.dirac(s2))))
            for a2, mu2 in m2.transitions_from(s2):
                if not (a2.is_visible and a2.label in sync):
                    ptrans.append((src, a2, dist_product(Distribution.dirac(s1), mu2)))

    mtrans = []
    loops1 = {s: sum((r for a, r, b in m1.mtrans if a == s and b == s), Q(0)) for s in m1.states}
    loops2 = {s: sum((r for a, r, b in m2.mtrans if a == s and b == s), Q(0)) for s in m2.states}
    for s1 in m1.states:
        for s2 in m2.states:
            src = compose_name(s1, s2)
            both = loops1[s1] and loops2[s2]
            if both:
                mtrans.append((src, loops1[s1] + loops2[s2], src))
            for a, lam, b in m1.mtrans:
                if a == s1 and not (both and b == a):
                    mtrans.append((src, lam, compose_name(b, s2)))
            for a, lam, b in m2.mtrans:
                if a == s2 and not (both and b == a):
                    mtrans.append((src, lam, compose_name(s1, b)))

    actions = tuple(sorted(_alphabet(m1) | _alphabet(m2)))
    return MarkovAutomaton(states=tuple(states), ptrans=tuple(ptrans), mtrans=tuple(mtrans),
                           init=compose_name(m1.init, m2.init), actions=actions,
                           name=name or f"{m1.name}|{m2.name}")


def restrict_init(ma: MarkovAutomaton, init: str) -> MarkovAutomaton:
    """Same automaton with another initial state."""
    return MarkovAutomaton(states=ma.states, ptrans=ma.ptrans, mtrans=ma.mtrans, init=init,
                           actions=ma.actions, name=ma.name)


@dataclass
class CongruenceCase:
    semantics: str
    relation: object
    lhs: str
    rhs: str
    context: str
    base_outcome: str
    composed_outcome: Optional[str] = None
    passed: Optional[bool] = None
    note: str = ""


@dataclass
class CongruenceReport:
    cases: List[CongruenceCase] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases if c.passed is not None)

    @property
    def undecided(self) -> List[CongruenceCase]:
        return [c for c in self.cases if "resource limit" in c.note]

    def failures(self) -> List[CongruenceCase]:
        return [c for c in self.cases if c.passed is False]

    def lines(self) -> List[str]:
        out = []
        for c in self.cases:
            status = "skip" if c.passed is None else ("pass" if c.passed else "FAIL")
            out.append(f"{status} {c.semantics} {c.relation} {c.lhs} ~ {c.rhs} | {c.context}: "
                       f"{c.base_outcome} -> {c.composed_outcome} {c.note}".rstrip())
        return out


def congruence_suite(ma: MarkovAutomaton, contexts: Sequence[MarkovAutomaton], pairs, bounds=None,
                     sync: Optional[Iterable[str]] = None, require_convergent: bool = True) -> CongruenceReport:
    """For every related pair and context, check the composed pair under the same relation.

    ``pairs`` holds ``(semantics, relation kind, lhs state, rhs state)``. The
    context's initial state is the state composed with. Cases whose operands
    are not time-convergent are skipped when ``require_convergent`` is set;
    checks that hit the resource limit leave their case undecided.
    """
    from .equivalence import DEFAULT_BOUNDS, BudgetExceeded, RelationKind, check_ma

    bounds = bounds or DEFAULT_BOUNDS
    report = CongruenceReport()
    for ctx in contexts:
        product = parallel_compose(ma, ctx, sync)
        convergent = is_time_convergent(ma) and is_time_convergent(ctx)
        for semantics, kind, lhs, rhs in pairs:
            kind = kind if isinstance(kind, RelationKind) else RelationKind(kind)
            where = f"{ctx.name}@{ctx.init}"
            try:
                base = check_ma(ma, semantics, kind, lhs, rhs, bounds)
            except BudgetExceeded:
                report.cases.append(CongruenceCase(str(semantics), str(kind), lhs, rhs, where, "resource-limit",
                                                   note="(resource limit)"))
                continue
            case = CongruenceCase(str(semantics), str(kind), lhs, rhs, where, base.outcome.value)
            report.cases.append(case)
            if not base.equivalent:
                case.note = "(pair not related, nothing to check)"
                continue
            if require_convergent and not convergent:
                case.note = "(time-divergent operand, skipped)"
                continue
            try:
                composed = check_ma(product, semantics, kind, compose_name(lhs, ctx.init),
                                    compose_name(rhs, ctx.init), bounds)
            except BudgetExceeded:
                case.composed_outcome = "resource-limit"
                case.note = "(resource limit)"
                continue
            case.composed_outcome = composed.outcome.value
            case.passed = composed.equivalent
    return report
