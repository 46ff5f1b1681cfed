"""Deterministic stop/take policies over internal transitions.

A policy fixes, for every state it visits, either to stop there or to take one
particular tau transition. Its limit from a start state is computed exactly by
solving the absorbing chain the policy induces, so tau cycles are handled
without unfolding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from .model import Q, Distribution, Mlts, ModelError, StateId, mix, state_key

STOP = None


@dataclass(frozen=True)
class Policy:
    """Mapping state -> ``None`` (stop) or index into the state's tau moves."""

    decision: Tuple[Tuple[StateId, Optional[int]], ...]

    @classmethod
    def of(cls, mapping: Mapping[StateId, Optional[int]]) -> "Policy":
        return cls(tuple(sorted(mapping.items(), key=lambda kv: state_key(kv[0]))))

    def as_dict(self) -> Dict[StateId, Optional[int]]:
        return dict(self.decision)

    def __str__(self):
        parts = [f"{s}:{'stop' if d is None else f'take{d}'}" for s, d in self.decision]
        return "{" + ", ".join(parts) + "}"


def solve_exact(a: List[List[Q]], b: List[List[Q]]) -> List[List[Q]]:
    """Solve ``a x = b`` (``b`` has several columns) by Gauss-Jordan elimination."""
    n = len(a)
    rows = [list(a[i]) + list(b[i]) for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        pv = rows[col][col]
        rows[col] = [x / pv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return [row[n:] for row in rows]


def policy_limit(m: Mlts, policy: Policy, start) -> Distribution:
    """Exact distribution over stop states reached from ``start``.

    ``start`` may be a state or a full distribution. The result has mass < 1
    exactly when the policy traps probability in a tau cycle.
    """
    decision = policy.as_dict()
    init = start if isinstance(start, Distribution) else Distribution.dirac(start)

    reach = []
    seen = set()
    frontier = list(init.support)
    while frontier:
        u = frontier.pop()
        if u in seen:
            continue
        seen.add(u)
        reach.append(u)
        if u not in decision:
            raise ModelError(f"policy leaves state {u} undecided")
        d = decision[u]
        if d is not None:
            moves = m.tau_moves(u)
            if d >= len(moves):
                raise ModelError(f"policy takes tau move {d} at {u}, which has only {len(moves)}")
            frontier.extend(moves[d].support)

    stops = [u for u in reach if decision[u] is None]
    takes = [u for u in reach if decision[u] is not None]
    succ = {u: m.tau_moves(u)[decision[u]] for u in takes}

    # take-states that can reach a stop state; the others keep their mass forever
    live = set()
    changed = True
    while changed:
        changed = False
        for u in takes:
            if u not in live and any(v in live or decision[v] is None for v in succ[u].support):
                live.add(u)
                changed = True
    live_list = [u for u in takes if u in live]
    index = {u: i for i, u in enumerate(live_list)}
    sindex = {z: j for j, z in enumerate(stops)}

    value: Dict[StateId, Dict[StateId, Q]] = {z: {z: Q(1)} for z in stops}
    if live_list:
        n = len(live_list)
        a = [[Q(int(i == j)) for j in range(n)] for i in range(n)]
        b = [[Q(0)] * len(stops) for _ in range(n)]
        for u in live_list:
            i = index[u]
            for v, p in succ[u].items():
                if v in index:
                    a[i][index[v]] -= p
                elif v in sindex:
                    b[i][sindex[v]] += p
        x = solve_exact(a, b)
        for u in live_list:
            value[u] = {z: x[index[u]][sindex[z]] for z in stops if x[index[u]][sindex[z]]}
    return mix((p, Distribution(value.get(u, {}))) for u, p in init.items())


def enumerate_policies(m: Mlts, roots: Iterable[StateId],
                       allow_stop: Callable[[StateId], bool] = lambda s: True,
                       allow_take: Callable[[StateId], bool] = lambda s: True):
    """Yield policies deciding exactly the states they reach from ``roots``.

    Decisions are explored in lexicographic order of (state order, choice),
    with stop before take.
    """
    roots = sorted(set(roots), key=state_key)

    def options(u):
        opts = []
        moves = m.tau_moves(u)
        if allow_stop(u) or not moves:
            opts.append(None)
        if allow_take(u):
            opts.extend(range(len(moves)))
        return opts

    def rec(decided: Dict[StateId, Optional[int]], pending: List[StateId]):
        pending = [u for u in pending if u not in decided]
        if not pending:
            yield Policy.of(decided)
            return
        pending = sorted(set(pending), key=state_key)
        u, rest = pending[0], pending[1:]
        for opt in options(u):
            decided[u] = opt
            nxt = list(rest)
            if opt is not None:
                nxt.extend(m.tau_moves(u)[opt].support)
            yield from rec(decided, nxt)
            del decided[u]

    yield from rec({}, roots)


def det_weak_tau(m: Mlts, s) -> Tuple[List[Tuple[Policy, Distribution]], List[Tuple[Policy, Distribution]]]:
    """Deterministic weak tau transitions from a state (or full distribution).

    Returns ``(full, deficient)``: policies whose limit is a full distribution,
    and policies that lose mass in a tau cycle.
    """
    start = s if isinstance(s, Distribution) else Distribution.dirac(s)
    full, deficient = [], []
    for pol in enumerate_policies(m, start.support):
        lim = policy_limit(m, pol, start)
        (full if lim.is_full else deficient).append((pol, lim))
    return full, deficient


def det_weak_tau_dists(m: Mlts, s) -> List[Distribution]:
    """Distinct full limits of :func:`det_weak_tau`, in enumeration order."""
    out, seen = [], set()
    for _, mu in det_weak_tau(m, s)[0]:
        if mu not in seen:
            seen.add(mu)
            out.append(mu)
    return out
