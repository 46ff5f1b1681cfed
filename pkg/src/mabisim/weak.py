"""Weak transitions, indexed challenges and bounded response search.

Distributions are split along a finite lattice: support subsets, optionally
refined by giving one support state a fraction ``k/d`` with ``d <= D``.
Weak moves are assembled from lifted blocks of deterministic weak tau
transitions, at most ``K`` blocks in a row. Challenges use the plain subsets;
responses may use the refinements too.
"""

from __future__ import annotations

import itertools
import logging
import threading
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .model import Q, TAU, Action, Distribution, Mlts, StateId, dist_scale, lift_choices, lift_step
from .policies import det_weak_tau_dists

trace = logging.getLogger("mabisim.trace")


@dataclass(frozen=True)
class SearchBounds:
    grid_denominator: int = 4
    tau_depth: int = 3

    def __post_init__(self):
        if self.grid_denominator < 1 or self.tau_depth < 1:
            raise ValueError("search bounds must be positive")

    def to_json(self):
        return {"grid_denominator": self.grid_denominator, "tau_depth": self.tau_depth}


DEFAULT_BOUNDS = SearchBounds()


@dataclass(frozen=True)
class Challenge:
    """``mu --action,rho--> result`` where ``split`` is the moving part of ``mu``."""

    action: Action
    rho: Q
    result: Distribution
    split: Distribution

    @property
    def pure_split(self) -> bool:
        return self.action.is_tau and self.result == self.split.normalize()

    def to_json(self):
        return {"action": str(self.action), "rho": str(self.rho), "result": self.result.to_literal(),
                "split": self.split.to_literal()}

    def __str__(self):
        return f"({self.action}, {self.rho}, {self.result})"


def action_order(a: Action):
    return {"tau": 0, "vis": 1, "rate": 2}[a.kind], a.label, a.value


def grid_fractions(d: int) -> List[Q]:
    return sorted({Q(k, q) for q in range(1, d + 1) for k in range(1, q)})


def split_shapes(n: int, d: int) -> List[Tuple[Q, ...]]:
    """Weight vectors over ``n`` support states, largest weight 1.

    Plain support subsets come first (by size, then lexicographically),
    followed by refinements that give one member a grid fraction.
    """
    subsets = []
    for size in range(1, n + 1):
        subsets.extend(itertools.combinations(range(n), size))
    shapes = [tuple(Q(int(i in c)) for i in range(n)) for c in subsets]
    fracs = grid_fractions(d)
    for c in subsets:
        if len(c) < 2:
            continue
        for i in c:
            for f in fracs:
                shapes.append(tuple(Q(0) if j not in c else (f if j == i else Q(1)) for j in range(n)))
    return shapes


def apply_shape(mu: Distribution, shape) -> Distribution:
    return Distribution._trusted(tuple((s, w * p) for (s, p), w in zip(mu.items(), shape) if w))


class BudgetExceeded(RuntimeError):
    """A search ran out of its pair or work budget before reaching a verdict."""

    def __init__(self, message: str, budget: int, stats: Optional[dict] = None):
        super().__init__(message)
        self.budget = budget
        self.stats = stats or {}


DEFAULT_WORK_LIMIT = 20_000


class WeakSpace:
    """Memoised weak-transition queries over one MLTS and one set of bounds."""

    def __init__(self, m: Mlts, bounds: SearchBounds = DEFAULT_BOUNDS, work_limit: int = DEFAULT_WORK_LIMIT):
        self.m = m
        self.bounds = bounds
        self.truncated = False
        self._local = threading.local()
        self.work_limit = work_limit
        self._det: Dict[StateId, List[Distribution]] = {}
        self._block: Dict[Distribution, List[Distribution]] = {}
        self._closure: Dict[Distribution, List[Distribution]] = {}
        self._post: Dict[Tuple[Distribution, Action], List[Distribution]] = {}
        self._responses: Dict[Tuple[Distribution, Action, bool], Dict[Distribution, Tuple[Q, Distribution]]] = {}
        self._challenges: Dict[Distribution, List[Challenge]] = {}
        self._shapes: Dict[int, list] = {}
        self._splits: Dict[Tuple[Distribution, bool], list] = {}

    def shapes(self, n: int, grid: bool = True):
        if n not in self._shapes:
            self._shapes[n] = split_shapes(n, self.bounds.grid_denominator)
        return self._shapes[n] if grid else self._shapes[n][:2 ** n - 1]

    def splits(self, mu: Distribution, grid: bool = True) -> List[Tuple[Distribution, Q, Distribution]]:
        """``(part, mass, normalized part)`` over the split lattice.

        ``grid=False`` keeps plain support subsets only; challenges use those,
        responses may also use the fractional refinements.
        """
        key = (mu, grid)
        if key not in self._splits:
            out, seen = [], set()
            for shape in self.shapes(len(mu), grid):
                part = apply_shape(mu, shape)
                norm = part.normalize()
                k = (norm, part.mass)
                if k not in seen:
                    seen.add(k)
                    out.append((part, part.mass, norm))
            self._splits[key] = out
        return self._splits[key]

    def _charge(self, choices):
        cost = 1
        for c in choices:
            cost *= max(len(c), 1)
        self.spend(cost)

    @property
    def work(self) -> int:
        """Work spent by the calling thread; each check runs in its own thread."""
        return getattr(self._local, "work", 0)

    @work.setter
    def work(self, value: int):
        self._local.work = value

    def spend(self, cost: int):
        """Count ``cost`` units of work against the limit (lifted combinations or pair tests)."""
        self.work += cost
        if self.work > self.work_limit:
            raise BudgetExceeded(f"work limit of {self.work_limit} lifted combinations exceeded",
                                 self.work_limit, {"work": self.work})

    def det_tau(self, s: StateId) -> List[Distribution]:
        if s not in self._det:
            self._det[s] = det_weak_tau_dists(self.m, s)
        return self._det[s]

    def tau_block(self, mu: Distribution) -> List[Distribution]:
        """One lifted block: every support state picks a deterministic weak tau result."""
        if mu not in self._block:
            choices = [self.det_tau(s) for s in mu.support]
            self._charge(choices)
            self._block[mu] = lift_choices([p for _, p in mu.items()], choices)
        return self._block[mu]

    def tau_closure(self, mu: Distribution) -> List[Distribution]:
        """Distributions reachable by at most ``K`` lifted deterministic blocks."""
        if mu not in self._closure:
            out, seen = [mu], {mu}
            frontier = [mu]
            for _ in range(self.bounds.tau_depth):
                nxt = []
                for d in frontier:
                    for e in self.tau_block(d):
                        if e not in seen:
                            seen.add(e)
                            out.append(e)
                            nxt.append(e)
                frontier = nxt
                if not frontier:
                    break
            else:
                if any(e not in seen for d in frontier for e in self.tau_block(d)):
                    self.truncated = True
            self._closure[mu] = out
        return self._closure[mu]

    def post(self, mu: Distribution, action: Action) -> List[Distribution]:
        """Weak successors of a full distribution under ``action``."""
        key = (mu, action)
        if key not in self._post:
            if action.is_tau:
                res = list(self.tau_closure(mu))
            else:
                res, seen = [], set()
                for pre in self.tau_closure(mu):
                    self._charge([self.m.moves(s, action) for s in pre.support])
                    for mid in lift_step(self.m, pre, action):
                        for d in self.tau_closure(mid):
                            if d not in seen:
                                seen.add(d)
                                res.append(d)
            self._post[key] = res
        return self._post[key]

    def enabled_actions(self, mu: Distribution) -> List[Action]:
        acts = set()
        for s in mu.support:
            acts.update(self.m.actions_of(s))
        return sorted(acts, key=action_order)

    def weak_enabled_actions(self, mu: Distribution) -> List[Action]:
        acts = {TAU}
        for d in self.tau_closure(mu):
            for s in d.support:
                acts.update(self.m.actions_of(s))
        return sorted(acts, key=action_order)

    def challenges(self, mu: Distribution) -> List[Challenge]:
        """Strong indexed challenges, one per (action, result) at maximal rho."""
        if mu not in self._challenges:
            best: Dict[Tuple[Action, Distribution], Challenge] = {}
            order = []
            for part, rho, norm in self.splits(mu, grid=False):
                cands = [Challenge(TAU, rho, norm, part)]
                for a in self.enabled_actions(norm):
                    for res in lift_step(self.m, norm, a):
                        cands.append(Challenge(a, rho, res, part))
                for c in cands:
                    k = (c.action, c.result)
                    if k not in best:
                        order.append(k)
                        best[k] = c
                    elif c.rho > best[k].rho:
                        best[k] = c
            self._challenges[mu] = [best[k] for k in order]
        return self._challenges[mu]

    def weak_challenges(self, mu: Distribution) -> Iterator[Challenge]:
        """Weak indexed moves of ``mu``, at maximal rho per (action, result).

        Strong challenges come first; a weak move is added only when it is
        new or reaches its result with a larger rho.
        """
        yield from self.challenges(mu)
        yield from self.extra_weak_challenges(mu)

    def extra_weak_challenges(self, mu: Distribution) -> Iterator[Challenge]:
        best = {(c.action, c.result): c.rho for c in self.challenges(mu)}
        for a in self.weak_enabled_actions(mu):
            for res, (rho, part) in self.responses(mu, a, grid=False).items():
                if rho > best.get((a, res), 0):
                    yield Challenge(a, rho, res, part)

    def responses(self, nu: Distribution, action: Action,
                  grid: bool = True) -> Dict[Distribution, Tuple[Q, Distribution]]:
        """Map each reachable weak result to the largest rho it can be reached with.

        A response may first move internally, then split, then perform the
        weak ``action`` move from the normalised part.
        """
        key = (nu, action, grid)
        if key not in self._responses:
            best: Dict[Distribution, Tuple[Q, Distribution]] = {}
            for pre in self.tau_closure(nu):
                for part, cap, norm in self.splits(pre, grid):
                    for res in self.post(norm, action):
                        if res not in best or cap > best[res][0]:
                            best[res] = (cap, part)
            self._responses[key] = best
        return self._responses[key]


def shared_space(m: Mlts, bounds: SearchBounds = DEFAULT_BOUNDS) -> WeakSpace:
    """One memoised space per MLTS and bounds, reused by every check on it."""
    per_model = m.caches.setdefault("spaces", {})
    if bounds not in per_model:
        per_model[bounds] = WeakSpace(m, bounds)
    return per_model[bounds]


def weak_post(m: Mlts, s, action: Action, bounds: SearchBounds = DEFAULT_BOUNDS) -> List[Distribution]:
    mu = s if isinstance(s, Distribution) else Distribution.dirac(s)
    return WeakSpace(m, bounds).post(mu, action)


def enumerate_challenges(m: Mlts, mu: Distribution, bounds: SearchBounds = DEFAULT_BOUNDS) -> List[Challenge]:
    return WeakSpace(m, bounds).challenges(mu)


def search_response(m: Mlts, nu: Distribution, action: Action, rho, accept: Callable[[Distribution], bool],
                    bounds: SearchBounds = DEFAULT_BOUNDS, space: Optional[WeakSpace] = None):
    """First ``(split, result)`` with ``nu ==action,rho==> result`` and ``accept(result)``."""
    space = space or WeakSpace(m, bounds)
    rho = Q(rho)
    for res, (cap, part) in space.responses(nu, action).items():
        if cap >= rho and accept(res):
            split = dist_scale(rho / cap, part)
            trace.debug("response %s --%s,%s--> %s via split %s", nu, action, rho, res, split)
            return split, res
    trace.debug("no response %s --%s,%s-->", nu, action, rho)
    return None
