"""Coinductive checkers for weak (bi)simulation on Markov labelled transition systems.

Every checker runs the same assume-and-discharge search over pairs of full
distributions. A pair is pushed onto an ordered list of assumptions; it is
discharged once every challenge has a response leading to an assumed pair or
to a pair whose reachable fragments are isomorphic. If a pair fails, it is
recorded as failed (failures are sound whatever was assumed) and every
assumption made after it is dropped, since those may have relied on it.
"""

from __future__ import annotations

import enum
import functools
import gc
import itertools
import logging
import sys
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .convergence import convergent_states
from .iso import shared_oracle
from .model import Q, Distribution, MarkovAutomaton, Mlts, ModelError, dist_scale, dist_sub
from .semantics import SemanticsKind, build_semantics
from .weak import DEFAULT_BOUNDS, BudgetExceeded, SearchBounds, WeakSpace, shared_space

trace = logging.getLogger("mabisim.trace")

DEFAULT_BUDGET = 10_000


class Outcome(enum.Enum):
    EQUIVALENT = "equivalent"
    DISTINGUISHED = "distinguished"


class Relation(enum.Enum):
    BISIM = "bisim"
    SIM = "sim"
    KERNEL = "kernel"
    EHZ = "ehz"
    DH = "dh"


class Caveat(enum.Enum):
    EXACT_ON_CORPUS_CLASS = "exact-on-corpus-class"
    BOUNDED_SEARCH = "bounded-search"


@dataclass(frozen=True)
class RelationKind:
    relation: Relation = Relation.BISIM
    divergence_sensitive: bool = False

    def __post_init__(self):
        if not isinstance(self.relation, Relation):
            object.__setattr__(self, "relation", Relation(self.relation))

    def __str__(self):
        return self.relation.value + ("+div" if self.divergence_sensitive else "")


Pair = Tuple[Distribution, Distribution]


@dataclass
class Verdict:
    outcome: Outcome
    relation: str
    bounds: SearchBounds
    caveat: Caveat
    witness: Optional[List[Pair]] = None
    counterexample: Optional[dict] = None
    semantics: Optional[str] = None
    stats: dict = field(default_factory=dict)

    @property
    def equivalent(self) -> bool:
        return self.outcome is Outcome.EQUIVALENT

    def __bool__(self):
        return self.equivalent

    def to_json(self) -> dict:
        doc = {
            "outcome": self.outcome.value,
            "relation": self.relation,
            "semantics": self.semantics,
            "bounds": self.bounds.to_json(),
            "caveat": self.caveat.value,
            "stats": self.stats,
        }
        if self.equivalent:
            doc["witness"] = [[a.to_literal(), b.to_literal()] for a, b in self.witness or []]
        else:
            doc["counterexample"] = self.counterexample
        return doc


_STACK_BYTES = 512 * 1024 * 1024
_RECURSION = 200_000
_GC_THRESHOLD = 100_000


def _run_deep(fn, *args):
    """Run a deeply recursive search in a thread with a large stack."""
    box = {}

    def target():
        try:
            box["value"] = fn(*args)
        except BaseException as exc:  # re-raised in the caller
            box["error"] = exc

    old_limit = sys.getrecursionlimit()
    old_size = threading.stack_size()
    old_gc = gc.get_threshold()
    sys.setrecursionlimit(max(old_limit, _RECURSION))
    # the search allocates many short-lived distributions and few cycles
    gc.set_threshold(max(old_gc[0], _GC_THRESHOLD), *old_gc[1:])
    try:
        threading.stack_size(_STACK_BYTES)
        worker = threading.Thread(target=target, name="mabisim-check")
        worker.start()
    finally:
        threading.stack_size(old_size)
    worker.join()
    sys.setrecursionlimit(old_limit)
    gc.set_threshold(*old_gc)
    if "error" in box:
        raise box["error"]
    return box["value"]


class _Game:
    """Shared assume-and-discharge machinery; subclasses define ``expand``."""

    symmetric = True

    def __init__(self, m: Mlts, bounds: SearchBounds = DEFAULT_BOUNDS, budget: int = DEFAULT_BUDGET,
                 divergence_sensitive: bool = False, space: Optional[WeakSpace] = None):
        self.m = m
        self.bounds = bounds
        self.budget = budget
        self.space = space or shared_space(m, bounds)
        self.divergence_sensitive = divergence_sensitive
        self._conv = convergent_states(m) if divergence_sensitive else None
        self.iso = shared_oracle(m, divergence_sensitive)
        self.assumed: List[Pair] = []
        self.index: Dict[Pair, int] = {}
        self.failed: Dict[Pair, dict] = {}
        self.pairs_explored = 0
        self.challenges_seen = 0
        self.depth = 0
        self.depth_limit: Optional[int] = None
        self.cutoff = False

    # pair bookkeeping

    def key(self, mu, nu) -> Pair:
        if self.symmetric and nu.sort_key() < mu.sort_key():
            return nu, mu
        return mu, nu

    def quick(self, mu, nu) -> bool:
        k = self.key(mu, nu)
        if k in self.index:
            return True
        if k in self.failed:
            return False
        return self.iso.related(mu, nu)

    def _diverges(self, mu) -> bool:
        return all(s not in self._conv for s in mu.support)

    def _push(self, k: Pair) -> int:
        self.pairs_explored += 1
        if self.pairs_explored > self.budget:
            raise BudgetExceeded(f"pair budget of {self.budget} exceeded", self.budget, self.stats())
        i = len(self.assumed)
        self.assumed.append(k)
        self.index[k] = i
        return i

    def _truncate(self, i: int):
        for k in self.assumed[i:]:
            del self.index[k]
        del self.assumed[i:]

    def check(self, mu, nu) -> bool:
        k = self.key(mu, nu)
        if k in self.failed:
            return False
        if k in self.index or self.iso.related(mu, nu):
            return True
        if self.divergence_sensitive and self._diverges(mu) != self._diverges(nu):
            self.failed[k] = {"reason": "divergence", "left_divergent": self._diverges(k[0])}
            return False
        if self.depth_limit is not None and self.depth >= self.depth_limit:
            # optimistic: failures found meanwhile stay sound, successes are rechecked deeper
            self.cutoff = True
            return True
        i = self._push(k)
        self.depth += 1
        try:
            reason = self.expand(*k)
        finally:
            self.depth -= 1
        if reason is None:
            return True
        self._truncate(i)
        self.failed[k] = reason
        trace.debug("failed %s ~ %s: %s", k[0], k[1], reason.get("challenge"))
        return False

    def deepening(self, mu, nu) -> bool:
        """Iterative deepening over the pair depth; the last round has no cutoff."""
        limit = 2
        while True:
            self.depth_limit, self.cutoff = limit, False
            self._truncate(0)
            ok = self.check(mu, nu)
            if not ok or not self.cutoff:
                return ok
            limit *= 2

    def expand(self, mu, nu) -> Optional[dict]:
        raise NotImplementedError

    def match(self, pairs_iter) -> Tuple[bool, list]:
        """Try candidate result pairs: cheap closure test first, then recursion."""
        cands = list(pairs_iter)
        self.space.spend(len(cands))
        for a, b in cands:
            if self.quick(a, b):
                return True, []
        tried = []
        for a, b in cands:
            if self.check(a, b):
                return True, []
            tried.append(self.key(a, b))
        return False, tried

    def stats(self) -> dict:
        return {"pairs_explored": self.pairs_explored, "challenges": self.challenges_seen}

    def counterexample(self, k: Pair, depth: int = 4, width: int = 4) -> dict:
        rec = self.failed.get(k)
        node = {"pair": [k[0].to_literal(), k[1].to_literal()]}
        if rec is None:
            node["reason"] = "not refuted"
            return node
        node.update({x: y for x, y in rec.items() if x != "tried"})
        if depth > 0 and rec.get("tried"):
            node["failed_responses"] = [self.counterexample(t, depth - 1, width) for t in rec["tried"][:width]]
        elif rec.get("tried"):
            node["failed_responses"] = len(rec["tried"])
        return node

    def run(self, mu, nu, relation: str, semantics=None) -> Verdict:
        for d in (mu, nu):
            if not d.is_full:
                raise ModelError(f"{d} is not a full distribution")
            for s in d.support:
                if s not in self.m:
                    raise ModelError(f"unknown state {s!r}")
        t0 = time.perf_counter()
        try:
            ok = _run_deep(self.deepening, mu, nu)
        except BudgetExceeded as exc:
            exc.stats = dict(self.stats(), **exc.stats)
            raise
        stats = dict(self.stats(), wall_time_ms=round((time.perf_counter() - t0) * 1000, 3))
        caveat = Caveat.BOUNDED_SEARCH if self.space.truncated else Caveat.EXACT_ON_CORPUS_CLASS
        if ok:
            # pairs closed by isomorphism are not listed, but the root always is
            witness = list(dict.fromkeys([self.key(mu, nu)] + list(self.assumed)))
            return Verdict(Outcome.EQUIVALENT, relation, self.bounds, caveat, witness=witness,
                           semantics=semantics, stats=stats)
        return Verdict(Outcome.DISTINGUISHED, relation, self.bounds, caveat,
                       counterexample=self.counterexample(self.key(mu, nu)), semantics=semantics, stats=stats)


class _BisimGame(_Game):
    """Strong indexed challenges answered by weak indexed responses."""

    def __init__(self, *args, symmetric=True, weak_challenges=False, **kwargs):
        super().__init__(*args, **kwargs)
        self.symmetric = symmetric
        self.weak_challenges = weak_challenges

    def _phases(self):
        yield self.space.challenges
        if self.weak_challenges:
            yield self.space.extra_weak_challenges

    def expand(self, mu, nu):
        sides = [("left", mu, nu)]
        if self.symmetric:
            sides.append(("right", nu, mu))
        for phase in self._phases():
            pending = []
            for side, chal_from, resp_from in sides:
                for c in phase(chal_from):
                    self.challenges_seen += 1
                    answers = self.space.responses(resp_from, c.action)
                    results = [r for r, (cap, _) in answers.items() if cap >= c.rho]
                    if not results:
                        trace.debug("%s challenge %s from %s: no response", side, c, chal_from)
                        return {"side": side, "challenge": c.to_json(), "tried": []}
                    pending.append((len(results), side, c, results))
            # fewest candidate responses first: likely refutations surface early
            pending.sort(key=lambda x: x[0])
            for _, side, c, results in pending:
                if side == "left":
                    cands = ((c.result, r) for r in results)
                else:
                    cands = ((r, c.result) for r in results)
                ok, tried = self.match(cands)
                trace.debug("%s challenge %s from %s: %s", side, c, mu if side == "left" else nu,
                            "matched" if ok else "unmatched")
                if not ok:
                    return {"side": side, "challenge": c.to_json(), "tried": tried}
        return None


class _EhzGame(_Game):
    """Split-based formulation: internal split, related parts, matched weak moves of the moving part."""

    def _moves(self, g):
        return [(a, r) for a in self.space.weak_enabled_actions(g) for r in self.space.post(g, a)]

    def _respond(self, side, g_norm, s_rest, rho, moves, other) -> Tuple[bool, list]:
        tried = []
        orient = (lambda a, b: (a, b)) if side == "left" else (lambda a, b: (b, a))
        for pre in self.space.tau_closure(other):
            for part, cap, norm in self.space.splits(pre):
                if cap < rho:
                    continue
                nug = dist_scale(rho / cap, part)
                nus = dist_sub(pre, nug) if rho < 1 else None
                if not self.check(*orient(g_norm, norm)):
                    tried.append(self.key(*orient(g_norm, norm)))
                    continue
                if s_rest is not None and not self.check(*orient(s_rest, nus.normalize())):
                    tried.append(self.key(*orient(s_rest, nus.normalize())))
                    continue
                good = True
                for a, res in moves:
                    ok, sub = self.match(orient(res, r) for r in self.space.post(norm, a))
                    if not ok:
                        tried.extend(sub[:1])
                        good = False
                        break
                if good:
                    return True, []
        return False, tried

    def expand(self, mu, nu):
        for side, a_dist, b_dist in (("left", mu, nu), ("right", nu, mu)):
            for part, rho, g_norm in self.space.splits(a_dist, grid=False):
                self.challenges_seen += 1
                rest = dist_sub(a_dist, part)
                s_rest = rest.normalize() if rest.mass else None
                moves = self._moves(g_norm)
                ok, tried = self._respond(side, g_norm, s_rest, rho, moves, b_dist)
                if not ok:
                    return {"side": side, "challenge": {"split": part.to_literal(), "rho": str(rho)}, "tried": tried}
        return None


def _decompose(nu: Distribution, weights: List[Q]):
    """Yield component lists ``[nu_i]`` with ``sum w_i nu_i == nu``.

    Each component takes its weight proportionally from the remaining mass
    on a subset of the remaining support.
    """
    def rec(rem: Distribution, i: int, acc):
        if i == len(weights) - 1:
            if rem.mass == weights[i]:
                yield acc + [rem.normalize()]
            return
        w = weights[i]
        sup = rem.support
        for size in range(1, len(sup) + 1):
            for c in itertools.combinations(sup, size):
                sub = rem.restrict(c)
                if sub.mass < w:
                    continue
                take = dist_scale(w / sub.mass, sub)
                left = dist_sub(rem, take)
                yield from rec(left, i + 1, acc + [sub.normalize()])

    yield from rec(nu, 0, [])


class _DhGame(_Game):
    """Decomposition-based formulation: weak moves split into weighted components."""

    def _decompositions(self, mu: Distribution):
        yield [(Q(1), mu)]
        if len(mu) > 1:
            yield [(p, Distribution.dirac(s)) for s, p in mu.items()]

    def expand(self, mu, nu):
        for side, a_dist, b_dist in (("left", mu, nu), ("right", nu, mu)):
            orient = (lambda x, y: (x, y)) if side == "left" else (lambda x, y: (y, x))
            for act in self.space.weak_enabled_actions(a_dist):
                for res in self.space.post(a_dist, act):
                    for comps in self._decompositions(res):
                        self.challenges_seen += 1
                        weights = [w for w, _ in comps]
                        if self._answer(comps, weights, act, b_dist, orient):
                            continue
                        return {"side": side, "challenge": {
                            "action": str(act), "result": res.to_literal(),
                            "components": [[str(w), c.to_literal()] for w, c in comps]}, "tried": []}
        return None

    def _answer(self, comps, weights, act, b_dist, orient) -> bool:
        for r in self.space.post(b_dist, act):
            for cand in _decompose(r, weights):
                self.space.spend(len(cand))
                if all(self.quick(*orient(c, d)) for (_, c), d in zip(comps, cand)):
                    return True
        for r in self.space.post(b_dist, act):
            for cand in _decompose(r, weights):
                self.space.spend(len(cand))
                if all(self.check(*orient(c, d)) for (_, c), d in zip(comps, cand)):
                    return True
        return False


def _dist(x) -> Distribution:
    return x if isinstance(x, Distribution) else Distribution.dirac(x)


def check_weak_bisim(m: Mlts, mu, nu, bounds: SearchBounds = DEFAULT_BOUNDS, *, budget: int = DEFAULT_BUDGET,
                     divergence_sensitive: bool = False, weak_challenges: bool = False,
                     semantics=None) -> Verdict:
    """Weak bisimilarity of two full distributions (or states) over ``m``."""
    game = _BisimGame(m, bounds, budget, divergence_sensitive, weak_challenges=weak_challenges)
    rel = str(RelationKind(Relation.BISIM, divergence_sensitive))
    return game.run(_dist(mu), _dist(nu), rel, semantics)


def check_weak_sim(m: Mlts, mu, nu, bounds: SearchBounds = DEFAULT_BOUNDS, *, budget: int = DEFAULT_BUDGET,
                   divergence_sensitive: bool = False, weak_challenges: bool = False, semantics=None) -> Verdict:
    """Is ``mu`` weakly simulated by ``nu``? Challenges come only from ``mu``."""
    game = _BisimGame(m, bounds, budget, divergence_sensitive, symmetric=False, weak_challenges=weak_challenges)
    rel = str(RelationKind(Relation.SIM, divergence_sensitive))
    return game.run(_dist(mu), _dist(nu), rel, semantics)


def check_kernel(m: Mlts, mu, nu, bounds: SearchBounds = DEFAULT_BOUNDS, *, budget: int = DEFAULT_BUDGET,
                 divergence_sensitive: bool = False, semantics=None) -> Verdict:
    """Mutual weak similarity."""
    fwd = check_weak_sim(m, mu, nu, bounds, budget=budget, divergence_sensitive=divergence_sensitive)
    bwd = check_weak_sim(m, nu, mu, bounds, budget=budget, divergence_sensitive=divergence_sensitive)
    rel = str(RelationKind(Relation.KERNEL, divergence_sensitive))
    stats = {k: fwd.stats.get(k, 0) + bwd.stats.get(k, 0) for k in set(fwd.stats) | set(bwd.stats)}
    caveat = Caveat.BOUNDED_SEARCH if Caveat.BOUNDED_SEARCH in (fwd.caveat, bwd.caveat) else Caveat.EXACT_ON_CORPUS_CLASS
    if fwd.equivalent and bwd.equivalent:
        return Verdict(Outcome.EQUIVALENT, rel, bounds, caveat, witness=fwd.witness + [(b, a) for a, b in bwd.witness],
                       semantics=semantics, stats=stats)
    bad = fwd if not fwd.equivalent else bwd
    ce = {"direction": "forward" if bad is fwd else "backward", "tree": bad.counterexample}
    return Verdict(Outcome.DISTINGUISHED, rel, bounds, caveat, counterexample=ce, semantics=semantics, stats=stats)


def check_ehz(m: Mlts, mu, nu, bounds: SearchBounds = DEFAULT_BOUNDS, *, budget: int = DEFAULT_BUDGET,
              semantics=None) -> Verdict:
    """Split-based weak bisimilarity; sub-distributions are normalised first."""
    mu, nu = _dist(mu), _dist(nu)
    rel = Relation.EHZ.value
    if mu.mass != nu.mass:
        return Verdict(Outcome.DISTINGUISHED, rel, bounds, Caveat.EXACT_ON_CORPUS_CLASS, semantics=semantics,
                       counterexample={"pair": [mu.to_literal(), nu.to_literal()],
                                       "reason": f"mass {mu.mass} != {nu.mass}"},
                       stats={"pairs_explored": 0, "challenges": 0, "wall_time_ms": 0})
    if mu.mass == 0:
        return Verdict(Outcome.EQUIVALENT, rel, bounds, Caveat.EXACT_ON_CORPUS_CLASS, witness=[(mu, nu)],
                       semantics=semantics, stats={"pairs_explored": 0, "challenges": 0, "wall_time_ms": 0})
    return _EhzGame(m, bounds, budget).run(mu.normalize(), nu.normalize(), rel, semantics)


def check_dh(m: Mlts, mu, nu, bounds: SearchBounds = DEFAULT_BOUNDS, *, budget: int = DEFAULT_BUDGET,
             semantics=None) -> Verdict:
    """Decomposition-based weak bisimilarity."""
    return _DhGame(m, bounds, budget).run(_dist(mu), _dist(nu), Relation.DH.value, semantics)


def check_relation(m: Mlts, kind: RelationKind, mu, nu, bounds: SearchBounds = DEFAULT_BOUNDS, *,
                   budget: int = DEFAULT_BUDGET, semantics=None) -> Verdict:
    rel, div = kind.relation, kind.divergence_sensitive
    if rel is Relation.BISIM:
        return check_weak_bisim(m, mu, nu, bounds, budget=budget, divergence_sensitive=div, semantics=semantics)
    if rel is Relation.SIM:
        return check_weak_sim(m, mu, nu, bounds, budget=budget, divergence_sensitive=div, semantics=semantics)
    if rel is Relation.KERNEL:
        return check_kernel(m, mu, nu, bounds, budget=budget, divergence_sensitive=div, semantics=semantics)
    if div:
        raise ValueError(f"divergence sensitivity is not defined for {rel.value}")
    if rel is Relation.EHZ:
        return check_ehz(m, mu, nu, bounds, budget=budget, semantics=semantics)
    return check_dh(m, mu, nu, bounds, budget=budget, semantics=semantics)


@functools.lru_cache(maxsize=32)
def _semantics_of(ma: MarkovAutomaton, semantics: SemanticsKind) -> Mlts:
    # shared so that repeated checks on one model also share the weak-move caches
    return build_semantics(ma, semantics)


def check_ma(ma: MarkovAutomaton, semantics, kind, mu, nu, bounds: SearchBounds = DEFAULT_BOUNDS, *,
             budget: int = DEFAULT_BUDGET) -> Verdict:
    """Build the requested semantics of ``ma`` and compare two base-state distributions."""
    semantics = SemanticsKind(semantics) if not isinstance(semantics, SemanticsKind) else semantics
    if isinstance(kind, str):
        kind = Relation(kind)
    if isinstance(kind, Relation):
        kind = RelationKind(kind)
    mu, nu = _dist(mu), _dist(nu)
    for d in (mu, nu):
        for s in d.support:
            if s not in ma.states:
                raise ModelError(f"unknown base state {s!r}")
    m = _semantics_of(ma, semantics)
    return check_relation(m, kind, mu, nu, bounds, budget=budget, semantics=semantics.value)
