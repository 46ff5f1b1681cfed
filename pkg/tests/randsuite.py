"""Seeded random-model sweeps shared by the property and acceptance tests."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, List

from mabisim import BudgetExceeded, gen_random_ma

# a small per-check budget keeps undecidable-in-budget models cheap to skip
CHECK_BUDGET = 300


@dataclass
class SweepResult:
    decided: int = 0
    skipped: int = 0
    seconds: float = 0.0
    violations: List[tuple] = field(default_factory=list)

    def summary(self) -> str:
        return (f"{self.decided} models decided, {self.skipped} skipped on resource limits, "
                f"{len(self.violations)} violations, {self.seconds:.1f}s")


def sweep(per_model: Callable, target: int = 200, **gen) -> SweepResult:
    """Run ``per_model`` on seeds 0, 1, ... until ``target`` models are decided.

    Every fourth seed allows internal cycles. A model is skipped when any of
    its checks hits the resource limit.
    """
    res = SweepResult()
    t0 = time.perf_counter()
    seed = 0
    while res.decided < target:
        ma = gen_random_ma(seed, tau_cycles=(seed % 4 == 0), **gen)
        try:
            bad = per_model(ma)
        except BudgetExceeded:
            res.skipped += 1
        else:
            res.decided += 1
            res.violations.extend((seed,) + tuple(b) for b in bad)
        seed += 1
    res.seconds = time.perf_counter() - t0
    return res


def renamed(ma, prefix: str):
    """Copy of ``ma`` whose states are renamed ``q3`` -> ``<prefix>3``."""
    from mabisim import Distribution, MarkovAutomaton

    def f(s):
        return prefix + s[1:]

    return MarkovAutomaton(states=[f(s) for s in ma.states],
                           ptrans=[(f(s), a, Distribution({f(t): p for t, p in mu.items()})) for s, a, mu in ma.ptrans],
                           mtrans=[(f(s), r, f(t)) for s, r, t in ma.mtrans],
                           init=f(ma.init), name=f"{prefix}{ma.name}")
