"""Exact distributions, Markov automata and Markov labelled transition systems.

All probabilities and rates are exact rationals (``Q``, gmpy2's ``mpq``). States are either
plain strings (base states) or :class:`Pair` values, which only occur in the
late semantics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Sequence, Tuple, Union

from gmpy2 import mpq as Q


class ModelError(ValueError):
    """Raised when a model or distribution violates a validity rule."""


class Pair(NamedTuple):
    """Late-semantics state ``[base,target]``."""

    base: str
    target: str

    def __str__(self):
        return f"[{self.base},{self.target}]"


StateId = Union[str, Pair]


def state_key(s: StateId):
    if isinstance(s, Pair):
        return (1, s.base, s.target)
    return (0, s, "")


def state_str(s: StateId) -> str:
    return str(s)


def as_fraction(x) -> Q:
    if isinstance(x, Q):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; use integers, fractions or 'p/q' strings")
    return Q(x)


@dataclass(frozen=True, order=True)
class Action:
    """An internal, visible or rate label.

    Use the module constant :data:`TAU` and the helpers :func:`visible` and
    :func:`rate` rather than the constructor.
    """

    kind: str
    label: str = ""
    value: Q = Q(0)

    @property
    def is_tau(self) -> bool:
        return self.kind == "tau"

    @property
    def is_rate(self) -> bool:
        return self.kind == "rate"

    @property
    def is_visible(self) -> bool:
        return self.kind == "vis"

    def __str__(self):
        if self.kind == "tau":
            return "tau"
        if self.kind == "rate":
            return f"rate({self.value})"
        return self.label

    def __repr__(self):
        return f"Action({self})"


TAU = Action("tau")


def visible(label: str) -> Action:
    if label == "tau":
        return TAU
    if not label:
        raise ModelError("empty action label")
    return Action("vis", label=label)


def rate(value) -> Action:
    v = as_fraction(value)
    if v <= 0:
        raise ModelError(f"rate must be positive, got {v}")
    return Action("rate", value=v)


class Distribution:
    """Finite (sub-)distribution with strictly positive exact weights.

    Entries are kept sorted by state so equal distributions are structurally
    equal and hash alike.
    """

    __slots__ = ("_items", "_hash", "_mass", "_support")

    def __init__(self, entries: Union[Mapping[StateId, object], Iterable[Tuple[StateId, object]]] = ()):
        if isinstance(entries, Mapping):
            entries = entries.items()
        acc: Dict[StateId, Q] = {}
        for s, p in entries:
            p = as_fraction(p)
            if p < 0:
                raise ModelError(f"negative probability {p} for {s}")
            if p:
                acc[s] = acc.get(s, Q(0)) + p
        items = tuple(sorted(acc.items(), key=lambda kv: state_key(kv[0])))
        if sum((p for _, p in items), Q(0)) > 1:
            raise ModelError(f"distribution mass {sum(p for _, p in items)} exceeds 1")
        self._items = items
        self._hash = hash(items)
        self._mass = None
        self._support = None

    @classmethod
    def dirac(cls, s: StateId) -> "Distribution":
        return cls(((s, Q(1)),))

    @classmethod
    def _trusted(cls, items: Tuple[Tuple[StateId, Q], ...]) -> "Distribution":
        d = object.__new__(cls)
        d._items = items
        d._hash = hash(items)
        d._mass = None
        d._support = None
        return d

    def items(self) -> Tuple[Tuple[StateId, Q], ...]:
        return self._items

    @property
    def support(self) -> Tuple[StateId, ...]:
        if self._support is None:
            self._support = tuple(s for s, _ in self._items)
        return self._support

    @property
    def mass(self) -> Q:
        if self._mass is None:
            self._mass = sum((p for _, p in self._items), Q(0))
        return self._mass

    @property
    def is_full(self) -> bool:
        return self.mass == 1

    @property
    def is_dirac(self) -> bool:
        return len(self._items) == 1 and self._items[0][1] == 1

    def __getitem__(self, s: StateId) -> Q:
        for t, p in self._items:
            if t == s:
                return p
        return Q(0)

    def __contains__(self, s) -> bool:
        return any(t == s for t, _ in self._items)

    def __iter__(self) -> Iterator[StateId]:
        return iter(self.support)

    def __len__(self):
        return len(self._items)

    def __eq__(self, other):
        return isinstance(other, Distribution) and self._items == other._items

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return tuple((state_key(s), p) for s, p in self._items)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if self.is_dirac:
            return f"δ({self._items[0][0]})"
        inner = ", ".join(f"{p}:{s}" for s, p in self._items)
        return "{" + inner + "}"

    def __repr__(self):
        return f"Distribution({self})"

    def to_literal(self) -> str:
        return "{" + ",".join(f"{p}:{s}" for s, p in self._items) + "}"

    def normalize(self) -> "Distribution":
        m = self.mass
        if m == 0:
            raise ModelError("cannot normalize the empty distribution")
        if m == 1:
            return self
        return Distribution._trusted(tuple((s, p / m) for s, p in self._items))

    def restrict(self, states) -> "Distribution":
        keep = set(states)
        return Distribution._trusted(tuple((s, p) for s, p in self._items if s in keep))

    def map_states(self, fn) -> "Distribution":
        return Distribution((fn(s), p) for s, p in self._items)


EMPTY = Distribution()


def dist_join(mu1: Distribution, mu2: Distribution) -> Distribution:
    """Pointwise sum; raises :class:`ModelError` if the joint mass exceeds 1."""
    if mu1.mass + mu2.mass > 1:
        raise ModelError(f"joined mass {mu1.mass + mu2.mass} exceeds 1")
    return Distribution(itertools.chain(mu1.items(), mu2.items()))


def dist_scale(x, mu: Distribution) -> Distribution:
    x = as_fraction(x)
    if x < 0:
        raise ModelError("negative scaling factor")
    if x * mu.mass > 1:
        raise ModelError(f"scaled mass {x * mu.mass} exceeds 1")
    if x == 1:
        return mu
    return Distribution._trusted(tuple((s, x * p) for s, p in mu.items() if x * p))


def dist_minus(mu: Distribution, s: StateId) -> Distribution:
    return Distribution._trusted(tuple((t, p) for t, p in mu.items() if t != s))


def compose_name(s1: StateId, s2: StateId) -> str:
    return f"{s1}|{s2}"


def dist_product(mu1: Distribution, mu2: Distribution) -> Distribution:
    """Product distribution over composite states ``s1|s2``. Inputs must be full."""
    if not (mu1.is_full and mu2.is_full):
        raise ModelError("product requires full distributions")
    return Distribution((compose_name(s1, s2), p1 * p2) for s1, p1 in mu1.items() for s2, p2 in mu2.items())


def mix(weighted: Iterable[Tuple[Q, Distribution]]) -> Distribution:
    """Sum of ``w * mu`` terms; no mass check beyond the constructor's."""
    acc: Dict[StateId, Q] = {}
    for w, mu in weighted:
        if not w:
            continue
        for s, p in mu.items():
            acc[s] = acc.get(s, Q(0)) + w * p
    return Distribution(acc)


PTrans = Tuple[str, Action, Distribution]
MTrans = Tuple[str, Q, str]


@dataclass(frozen=True)
class MarkovAutomaton:
    states: Tuple[str, ...]
    ptrans: Tuple[PTrans, ...]
    mtrans: Tuple[MTrans, ...]
    init: str
    actions: frozenset = frozenset()
    name: str = "ma"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "ptrans", tuple(self.ptrans))
        object.__setattr__(self, "mtrans", tuple((s, as_fraction(r), t) for s, r, t in self.mtrans))
        labels = {a.label for _, a, _ in self.ptrans if a.is_visible}
        object.__setattr__(self, "actions", frozenset(self.actions) | labels)
        self.validate()

    def validate(self):
        known = set(self.states)
        if not self.states:
            raise ModelError("a Markov automaton needs at least one state")
        if len(known) != len(self.states):
            raise ModelError("duplicate state names")
        if self.init not in known:
            raise ModelError(f"unknown initial state {self.init!r}")
        for src, act, mu in self.ptrans:
            if src not in known:
                raise ModelError(f"unknown state {src!r}")
            if act.is_rate:
                raise ModelError("rate labels are not allowed on probabilistic transitions")
            if not mu.is_full:
                raise ModelError(f"distribution mass {mu.mass} ≠ 1")
            for t in mu.support:
                if t not in known:
                    raise ModelError(f"unknown state {t!r}")
        for src, r, tgt in self.mtrans:
            if src not in known:
                raise ModelError(f"unknown state {src!r}")
            if tgt not in known:
                raise ModelError(f"unknown state {tgt!r}")
            if r <= 0:
                raise ModelError(f"nonpositive rate {r}")

    def _check_state(self, s):
        if s not in self.states:
            raise ModelError(f"unknown state {s!r}")

    def transitions_from(self, s: str) -> List[Tuple[Action, Distribution]]:
        return [(a, mu) for src, a, mu in self.ptrans if src == s]


def exit_rate(ma: MarkovAutomaton, s: str) -> Q:
    ma._check_state(s)
    return sum((r for src, r, _ in ma.mtrans if src == s), Q(0))


def rate_between(ma: MarkovAutomaton, s: str, t: str) -> Q:
    ma._check_state(s)
    ma._check_state(t)
    return sum((r for src, r, tgt in ma.mtrans if src == s and tgt == t), Q(0))


class Mlts:
    """Markov labelled transition system.

    ``trans`` entries are ``(source, action, full distribution)``. The
    constructor enforces at most one rate transition per state and maximal
    progress.
    """

    def __init__(self, states: Iterable[StateId], trans: Iterable[Tuple[StateId, Action, Distribution]], name: str = "mlts"):
        self.states = tuple(sorted(set(states), key=state_key))
        self.name = name
        seen = set()
        ordered = []
        for t in trans:
            if t not in seen:
                seen.add(t)
                ordered.append(t)
        self.trans = tuple(ordered)
        self._out: Dict[StateId, List[Tuple[Action, Distribution]]] = {s: [] for s in self.states}
        self._moves: Dict = {}
        # per-model caches of the search layers; they live and die with the model
        self.caches: Dict[str, Dict] = {}
        for src, a, mu in self.trans:
            if src not in self._out:
                raise ModelError(f"unknown state {src!r}")
            self._out[src].append((a, mu))
        self.validate()

    def validate(self):
        for src, a, mu in self.trans:
            if not mu.is_full:
                raise ModelError(f"transition {src} --{a}--> {mu} is not full")
            for t in mu.support:
                if t not in self._out:
                    raise ModelError(f"unknown state {t!r}")
        for s, outs in self._out.items():
            rates = [(a, mu) for a, mu in outs if a.is_rate]
            if len(rates) > 1:
                raise ModelError(f"state {s} has more than one Markovian transition")
            if rates and any(a.is_tau for a, _ in outs):
                raise ModelError(f"state {s} violates maximal progress")

    def __contains__(self, s):
        return s in self._out

    def out(self, s: StateId) -> List[Tuple[Action, Distribution]]:
        try:
            return self._out[s]
        except KeyError:
            raise ModelError(f"unknown state {s!r}") from None

    def moves(self, s: StateId, action: Action) -> List[Distribution]:
        key = (s, action)
        if key not in self._moves:
            self._moves[key] = [mu for a, mu in self.out(s) if a == action]
        return self._moves[key]

    def tau_moves(self, s: StateId) -> List[Distribution]:
        return self.moves(s, TAU)

    def actions_of(self, s: StateId) -> List[Action]:
        acts = []
        for a, _ in self.out(s):
            if a not in acts:
                acts.append(a)
        return acts

    def __repr__(self):
        return f"Mlts({self.name!r}, {len(self.states)} states, {len(self.trans)} transitions)"


def is_stable(system: Union[MarkovAutomaton, Mlts], s: StateId) -> bool:
    if isinstance(system, MarkovAutomaton):
        system._check_state(s)
        return not any(src == s and a.is_tau for src, a, _ in system.ptrans)
    return not system.tau_moves(s)


def is_stable_dist(system, mu: Distribution) -> bool:
    return all(is_stable(system, s) for s in mu.support)


def lift_choices(weights: Sequence[Q], choices: Sequence[Sequence[Distribution]]) -> List[Distribution]:
    """Distinct ``sum_i weights[i] * choices[i][k_i]`` over all index vectors.

    Entries come out ordered by state, as ``Distribution`` expects.
    """
    if len(weights) == 1 and weights[0] == 1:
        return list(dict.fromkeys(choices[0]))
    if all(len(opts) == 1 for opts in choices):
        acc: Dict[StateId, Q] = {}
        for w, (mu,) in zip(weights, choices):
            for s, p in mu.items():
                acc[s] = acc.get(s, 0) + w * p
        return [Distribution._trusted(tuple(sorted(acc.items(), key=lambda kv: state_key(kv[0]))))]
    scaled = [[[(t, w * p) for t, p in mu.items()] for mu in opts] for w, opts in zip(weights, choices)]
    rank = {t: i for i, t in enumerate(sorted({t for opts in choices for mu in opts for t in mu.support},
                                               key=state_key))}
    out: Dict[Tuple, None] = {}
    for pick in itertools.product(*scaled):
        acc: Dict[StateId, Q] = {}
        for part in pick:
            for t, p in part:
                acc[t] = acc.get(t, 0) + p
        out[tuple(sorted(acc.items(), key=lambda kv: rank[kv[0]]))] = None
    return [Distribution._trusted(items) for items in out]


def dist_sub(mu: Distribution, nu: Distribution) -> Distribution:
    """Pointwise difference; ``nu`` must lie below ``mu`` everywhere."""
    acc = dict(mu.items())
    for s, p in nu.items():
        acc[s] = acc.get(s, Q(0)) - p
        if acc[s] < 0:
            raise ModelError(f"cannot subtract: {nu} exceeds {mu} at {s}")
    return Distribution(acc)


def lift_step(m: Mlts, mu: Distribution, action: Action) -> List[Distribution]:
    """All ``mu --action--> mu'`` obtained by one choice per support state."""
    choices = []
    for s in mu.support:
        succ = m.moves(s, action)
        if not succ:
            return []
        choices.append(succ)
    return lift_choices([p for _, p in mu.items()], choices)
