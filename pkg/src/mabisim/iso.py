"""Isomorphic reachable fragments.

If a bijection between the states reachable from ``mu`` and from ``nu`` maps
``mu`` onto ``nu`` and every transition onto a transition, then the pairs
``(x, pi(x))`` form a weak bisimulation: each challenge is answered by its
mirror image. Without combined transitions this is one of the few closures
that stays sound; lifting a relation on states through a coupling is not,
because one state cannot answer two partners with different moves.

States whose only transition is an internal move to a single state are
skipped first: such a step can always be taken inside a weak response, so a
distribution and the one with those states moved on are weakly bisimilar.
"""

from __future__ import annotations

from typing import Dict, Hashable, Optional

from .convergence import convergent_states
from .model import TAU, Distribution, Mlts


def inert_successors(m: Mlts) -> Dict[Hashable, Hashable]:
    """Map each state to the end of its chain of inert internal moves."""
    succ = {}
    for s in m.states:
        out = list(m.out(s))
        if len(out) == 1 and out[0][0] == TAU and out[0][1].is_dirac:
            succ[s] = out[0][1].support[0]
    nf = {}
    for s in m.states:
        path, x = [], s
        while x in succ and x not in nf and x not in path:
            path.append(x)
            x = succ[x]
        if x in nf:
            end = nf[x]
        elif x in path:
            # a cycle of inert moves; any fixed member will do
            end = min(path[path.index(x):], key=str)
        else:
            end = x
        for y in path:
            nf[y] = end
        nf.setdefault(s, end)
    return nf


def _push(nf, mu: Distribution) -> Distribution:
    if all(nf[s] == s for s in mu.support):
        return mu
    acc: Dict = {}
    for s, p in mu.items():
        acc[nf[s]] = acc.get(nf[s], 0) + p
    return Distribution(acc)


def _colours(m: Mlts, outs, initial: Dict[Hashable, Hashable]) -> Dict[Hashable, int]:
    """Colour refinement; isomorphic states always share a colour."""
    names: Dict[Hashable, int] = {}
    col = {s: names.setdefault(initial[s], len(names)) for s in m.states}
    while True:
        names = {}
        sig = {}
        for s in m.states:
            outs_s = sorted((str(a), tuple(sorted((str(p), col[t]) for t, p in mu.items())))
                            for a, mu in outs[s])
            sig[s] = (col[s], tuple(outs_s))
        new = {}
        for s in m.states:
            new[s] = names.setdefault(sig[s], len(names))
        if len(set(new.values())) == len(set(col.values())):
            return new
        col = new


class IsoOracle:
    """Answers whether two distributions head isomorphic reachable fragments.

    ``marks`` optionally assigns each state a label that the bijection must
    preserve (used for time convergence in the divergence-sensitive game).
    """

    def __init__(self, m: Mlts, marks: Optional[Dict[Hashable, Hashable]] = None):
        self.m = m
        marks = marks or {}
        self.nf = inert_successors(m)
        # pushing may merge transitions; only the set of moves matters for mirroring
        self.outs = {s: list(dict.fromkeys((a, _push(self.nf, mu)) for a, mu in m.out(s))) for s in m.states}
        self.col = _colours(m, self.outs, {s: marks.get(s) for s in m.states})
        self._cache: Dict = {}

    def _profile(self, mu: Distribution):
        return sorted((str(p), self.col[s]) for s, p in mu.items())

    def related(self, mu: Distribution, nu: Distribution) -> bool:
        if mu == nu:
            return True
        mu, nu = _push(self.nf, mu), _push(self.nf, nu)
        if mu == nu:
            return True
        if len(mu) != len(nu) or self._profile(mu) != self._profile(nu):
            return False
        k = (mu, nu)
        if k not in self._cache:
            self._cache[k] = self._search(mu, nu)
        return self._cache[k]

    def _search(self, mu: Distribution, nu: Distribution) -> bool:
        mp: Dict = {}
        inv: Dict = {}
        outs = self.outs.__getitem__

        def assign(s, t) -> Optional[bool]:
            """None: already consistent; True: new entry; False: clash."""
            if s in mp:
                return None if mp[s] == t else False
            if t in inv or self.col[s] != self.col[t]:
                return False
            mp[s], inv[t] = t, s
            return True

        def undo(s, t):
            del mp[s]
            del inv[t]

        # obligations are a linked list of tuples so backtracking needs no copying
        def solve(obl) -> bool:
            if obl is None:
                return True
            head, rest = obl
            kind = head[0]
            if kind == "state":
                _, s, t = head
                r = assign(s, t)
                if r is False:
                    return False
                if r is None:
                    return solve(rest)
                a, b = outs(s), outs(t)
                if len(a) == len(b) and solve((("outs", tuple(a), tuple(b)), rest)):
                    return True
                undo(s, t)
                return False
            if kind == "outs":
                _, la, lb = head
                if not la:
                    return solve(rest)
                (act, d), tail = la[0], la[1:]
                for i, (act2, d2) in enumerate(lb):
                    if act2 != act or len(d2) != len(d):
                        continue
                    nxt = (("dist", d, d2), (("outs", tail, lb[:i] + lb[i + 1:]), rest))
                    if solve(nxt):
                        return True
                return False
            # "dist": match the first support state of the left side
            _, d1, d2 = head
            if not d1:
                return solve(rest)
            items = d1 if isinstance(d1, tuple) else tuple(sorted(d1.items(), key=lambda x: str(x[0])))
            right = d2 if isinstance(d2, tuple) else tuple(d2.items())
            (s, p), tail = items[0], items[1:]
            for j, (t, q) in enumerate(right):
                if q != p or self.col[s] != self.col[t] or (s in mp and mp[s] != t):
                    continue
                nxt = (("state", s, t), (("dist", tail, right[:j] + right[j + 1:]), rest))
                if solve(nxt):
                    return True
            return False

        return solve((("dist", mu, nu), None))


def shared_oracle(m: Mlts, divergence_sensitive: bool = False) -> IsoOracle:
    """Cached oracle per MLTS; the divergence-sensitive one also preserves time convergence."""
    per_model = m.caches.setdefault("iso", {})
    if divergence_sensitive not in per_model:
        marks = None
        if divergence_sensitive:
            conv = convergent_states(m)
            marks = {s: s in conv for s in m.states}
        per_model[divergence_sensitive] = IsoOracle(m, marks)
    return per_model[divergence_sensitive]
