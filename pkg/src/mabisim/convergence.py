"""Time convergence: can a state reach a stable distribution by internal moves?"""

from __future__ import annotations

from typing import Dict, List, Union

from .model import Distribution, MarkovAutomaton, Mlts, ModelError, StateId


def _tau_graph(system: Union[MarkovAutomaton, Mlts]) -> Dict[StateId, List[Distribution]]:
    if isinstance(system, MarkovAutomaton):
        g = {s: [] for s in system.states}
        for src, a, mu in system.ptrans:
            if a.is_tau:
                g[src].append(mu)
        return g
    return {s: list(system.tau_moves(s)) for s in system.states}


def convergent_states(system: Union[MarkovAutomaton, Mlts]) -> frozenset:
    """States that reach a stable state with probability one under some scheduler.

    Standard almost-sure reachability fixpoint: repeatedly restrict to states
    that can reach the stable set using only moves whose support stays inside
    the current candidate set. Memoryless deterministic schedulers suffice, so
    this agrees with the existence of a full, stable deterministic weak tau
    limit.
    """
    g = _tau_graph(system)
    target = {s for s, moves in g.items() if not moves}
    cand = set(g)
    while True:
        reach = set(target & cand)
        changed = True
        while changed:
            changed = False
            for s in cand - reach:
                for mu in g[s]:
                    sup = set(mu.support)
                    if sup <= cand and sup & reach:
                        reach.add(s)
                        changed = True
                        break
        if reach == cand:
            return frozenset(cand)
        cand = reach


def is_time_convergent(system: Union[MarkovAutomaton, Mlts], s: StateId = None) -> bool:
    """Convergence of one state, or of every state when ``s`` is omitted."""
    conv = convergent_states(system)
    if s is None:
        return len(conv) == len(system.states)
    if s not in set(system.states):
        raise ModelError(f"unknown state {s!r}")
    return s in conv


def is_time_divergent_dist(system, mu: Distribution, convergent=None) -> bool:
    """A distribution is time-divergent iff every support state is."""
    conv = convergent_states(system) if convergent is None else convergent
    return all(s not in conv for s in mu.support)
