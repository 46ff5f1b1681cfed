"""Seeded random Markov automata for property tests."""

from __future__ import annotations

import random
from typing import Sequence

from .model import Q, TAU, Distribution, MarkovAutomaton, visible

PROBS = (Q(1, 2), Q(1, 3), Q(2, 3), Q(1, 4), Q(3, 4))


def _random_dist(rng: random.Random, targets: Sequence[str]) -> Distribution:
    if len(targets) == 1 or rng.random() < 0.5:
        return Distribution.dirac(rng.choice(targets))
    a, b = rng.sample(list(targets), 2)
    p = rng.choice(PROBS)
    return Distribution({a: p, b: 1 - p})


def gen_random_ma(seed: int, max_states: int = 5, max_branch: int = 2, rate_pool=(1, 2, 3),
                  tau_cycles: bool = False, labels: Sequence[str] = ("a", "b"),
                  tau_bias: float = 0.4) -> MarkovAutomaton:
    """Deterministic in ``seed``. Without ``tau_cycles`` internal moves only go to later states."""
    if max_states < 1:
        raise ValueError("max_states must be at least 1")
    rng = random.Random(seed)
    n = rng.randint(1, max_states)
    states = [f"q{i}" for i in range(n)]
    ptrans, mtrans = [], []
    for i, s in enumerate(states):
        for _ in range(rng.randint(0, max_branch)):
            if rng.random() < tau_bias:
                targets = states if tau_cycles else states[i + 1:]
                if not targets:
                    continue
                ptrans.append((s, TAU, _random_dist(rng, targets)))
            else:
                ptrans.append((s, visible(rng.choice(labels)), _random_dist(rng, states)))
        for _ in range(rng.randint(0, max_branch)):
            mtrans.append((s, Q(rng.choice(list(rate_pool))), rng.choice(states)))
    # duplicates are harmless for mtrans (rates add) but pointless for ptrans
    ptrans = list(dict.fromkeys(ptrans))
    return MarkovAutomaton(states=states, ptrans=ptrans, mtrans=mtrans, init=states[0],
                           name=f"rand{seed}")
