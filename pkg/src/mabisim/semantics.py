"""Early and late MLTS semantics of Markov automata."""

from __future__ import annotations

import enum
from typing import Dict, List

from .convergence import convergent_states
from .model import (TAU, Distribution, MarkovAutomaton, Mlts, Pair, exit_rate, is_stable, lift_choices, rate,
                    rate_between)
from .policies import enumerate_policies, policy_limit


class SemanticsKind(enum.Enum):
    EARLY = "early"
    LATE = "late"
    LATE_STRONG_ONLY = "late-strong"


def build_early(ma: MarkovAutomaton) -> Mlts:
    """Replace the Markovian edges of each stable state by one race transition."""
    trans = list(ma.ptrans)
    for s in ma.states:
        total = exit_rate(ma, s)
        if total > 0 and is_stable(ma, s):
            mu = Distribution((t, rate_between(ma, s, t) / total) for t in ma.states if rate_between(ma, s, t))
            trans.append((s, rate(total), mu))
    return Mlts(ma.states, trans, name=f"{ma.name}/early")


def _late_continuations(early: Mlts, mu: Distribution, conv) -> List[Distribution]:
    # Stop is forced at stable states; at unstable states it is only allowed when
    # no stable distribution can be reached (time-divergent), so every
    # continuation commits to a resolved outcome.
    out, seen = [], set()
    pols = enumerate_policies(
        early, mu.support,
        allow_stop=lambda u: not early.tau_moves(u) or u not in conv,
    )
    for pol in pols:
        lim = policy_limit(early, pol, mu)
        if lim.is_full and lim not in seen:
            seen.add(lim)
            out.append(lim)
    return out


def _strong_continuations(early: Mlts, mu: Distribution) -> List[Distribution]:
    # at most one strong tau step: stable states stay, unstable ones take one move
    choices = [[Distribution.dirac(u)] if not early.tau_moves(u) else early.tau_moves(u) for u in mu.support]
    return lift_choices([p for _, p in mu.items()], choices)


def build_late(ma: MarkovAutomaton, kind: SemanticsKind = SemanticsKind.LATE) -> Mlts:
    """Late semantics: resolve the race first, delay the sojourn in ``[s,t]`` states.

    Base states keep their non-Markovian early transitions; a stable state with
    positive exit rate instead gets ``s --tau--> [s,mu]`` for every
    continuation ``mu`` of its race distribution. Only generated pair states
    are materialised.
    """
    if kind is SemanticsKind.EARLY:
        return build_early(ma)
    early = build_early(ma)
    conv = convergent_states(early)
    trans = []
    pair_states: Dict[Pair, None] = {}
    for s in ma.states:
        outs = early.out(s)
        plain = [(a, mu) for a, mu in outs if not a.is_rate]
        trans.extend((s, a, mu) for a, mu in plain)
        race = [(a, mu) for a, mu in outs if a.is_rate]
        if not race:
            continue
        lam, mu = race[0]
        if kind is SemanticsKind.LATE:
            conts = _late_continuations(early, mu, conv)
        else:
            conts = _strong_continuations(early, mu)
        for cont in conts:
            lifted = Distribution((Pair(s, t), p) for t, p in cont.items())
            trans.append((s, TAU, lifted))
            for t in cont.support:
                pair_states[Pair(s, t)] = None
    for ps in pair_states:
        trans.append((ps, rate(exit_rate(ma, ps.base)), Distribution.dirac(ps.target)))
        trans.extend((ps, a, mu) for a, mu in early.out(ps.base) if not a.is_rate)
    states = list(ma.states) + list(pair_states)
    return Mlts(states, trans, name=f"{ma.name}/{kind.value}")


def build_semantics(ma: MarkovAutomaton, kind) -> Mlts:
    kind = SemanticsKind(kind) if not isinstance(kind, SemanticsKind) else kind
    if kind is SemanticsKind.EARLY:
        return build_early(ma)
    return build_late(ma, kind)
