"""Weak bisimulation and simulation checking for Markov automata.

Markov automata are turned into Markov labelled transition systems (early or
late semantics) and compared by a coinductive search over exact rational
distributions.
"""

__version__ = "0.1.0"

from .model import (TAU, Action, Distribution, MarkovAutomaton, Mlts, ModelError, Pair, dist_join,
                    dist_minus, dist_product, dist_scale, exit_rate, is_stable, is_stable_dist, lift_step,
                    rate, rate_between, visible)
from .textformat import ModelSyntaxError, load_model, parse_distribution, parse_model, serialize_model
from .policies import Policy, det_weak_tau, det_weak_tau_dists, policy_limit
from .semantics import SemanticsKind, build_early, build_late, build_semantics
from .convergence import convergent_states, is_time_convergent, is_time_divergent_dist
from .weak import (DEFAULT_BOUNDS, Challenge, SearchBounds, WeakSpace, enumerate_challenges, search_response,
                   weak_post)
from .equivalence import (BudgetExceeded, Caveat, Outcome, Relation, RelationKind, Verdict, check_dh, check_ehz,
                          check_kernel, check_ma, check_relation, check_weak_bisim, check_weak_sim)
from .composition import congruence_suite, parallel_compose
from .corpus import Claim, CorpusEntry, corpus, replay
from .randgen import gen_random_ma
from .dot import to_dot

__all__ = [
    "TAU", "Action", "Distribution", "MarkovAutomaton", "Mlts", "ModelError", "Pair", "dist_join", "dist_minus",
    "dist_product", "dist_scale", "exit_rate", "is_stable", "is_stable_dist", "lift_step", "rate",
    "rate_between", "visible", "ModelSyntaxError", "load_model", "parse_distribution", "parse_model",
    "serialize_model", "Policy", "det_weak_tau", "det_weak_tau_dists", "policy_limit", "SemanticsKind",
    "build_early", "build_late", "build_semantics", "convergent_states", "is_time_convergent",
    "is_time_divergent_dist", "DEFAULT_BOUNDS", "Challenge", "SearchBounds", "WeakSpace",
    "enumerate_challenges", "search_response", "weak_post", "BudgetExceeded", "Caveat", "Outcome", "Relation",
    "RelationKind", "Verdict", "check_dh", "check_ehz", "check_kernel", "check_ma", "check_relation",
    "check_weak_bisim", "check_weak_sim", "congruence_suite", "parallel_compose", "Claim", "CorpusEntry",
    "corpus", "replay", "gen_random_ma", "to_dot",
]
