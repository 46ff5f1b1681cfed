"""Line-oriented text format for Markov automata.

Example::

    ma fig1b
    states: t, t1, t2
    init: t
    ptrans: t1 --a--> { 1/2: t1, 1/2: t2 }
    mtrans: t --1--> t1

``tau`` is the internal action. A bare state name after ``-->`` is a Dirac
distribution. Everything after ``#`` is a comment.
"""

from __future__ import annotations

import re
from typing import List, Optional

from .model import Q, Distribution, MarkovAutomaton, ModelError, visible

_NAME = r"[A-Za-z0-9_'.|]+"
_NAME_RE = re.compile(rf"^{_NAME}$")
_ARROW_RE = re.compile(rf"^\s*({_NAME})\s*--\s*([^\s-][^\s]*?)\s*-->\s*(.+?)\s*$")


class ModelSyntaxError(ModelError):
    def __init__(self, msg: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


def parse_number(text: str) -> Q:
    text = text.strip()
    if not re.fullmatch(r"\d+(/\d+)?|\d*\.\d+", text):
        raise ValueError(f"not a rational number: {text!r}")
    value = Q(text)
    return value


def parse_distribution(text: str) -> Distribution:
    """Parse ``{1/2: s1, 1/2: s2}`` or a bare state name (Dirac)."""
    text = text.strip()
    if _NAME_RE.match(text):
        return Distribution.dirac(text)
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"malformed distribution {text!r}")
    body = text[1:-1].strip()
    if not body:
        raise ValueError("empty distribution")
    entries = []
    for part in body.split(","):
        if ":" not in part:
            raise ValueError(f"malformed entry {part.strip()!r}, expected 'p: state'")
        p, s = part.split(":", 1)
        s = s.strip()
        if not _NAME_RE.match(s):
            raise ValueError(f"bad state name {s!r}")
        entries.append((s, parse_number(p)))
    return Distribution(entries)


def parse_model(text: str) -> MarkovAutomaton:
    name = "ma"
    states: Optional[List[str]] = None
    init = None
    actions: List[str] = []
    ptrans = []
    mtrans = []
    refs = []  # (state, line, column) for unknown-state diagnostics

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        if stripped.startswith("ma ") or stripped == "ma":
            name = stripped[2:].strip() or "ma"
            continue
        if ":" not in stripped:
            raise ModelSyntaxError(f"expected 'keyword: ...', got {stripped!r}", lineno, indent + 1)
        key, rest = stripped.split(":", 1)
        key = key.strip()
        col = indent + len(stripped) - len(rest.lstrip()) + 1
        rest = rest.strip()
        if key == "states":
            states = [s.strip() for s in rest.split(",") if s.strip()]
            for s in states:
                if not _NAME_RE.match(s):
                    raise ModelSyntaxError(f"bad state name {s!r}", lineno, col)
        elif key == "init":
            if not _NAME_RE.match(rest):
                raise ModelSyntaxError(f"bad state name {rest!r}", lineno, col)
            init = rest
            refs.append((rest, lineno, col))
        elif key == "actions":
            actions = [a.strip() for a in rest.split(",") if a.strip()]
        elif key in ("ptrans", "mtrans"):
            m = _ARROW_RE.match(rest)
            if not m:
                raise ModelSyntaxError(f"expected 'src --label--> target', got {rest!r}", lineno, col)
            src, label, target = m.groups()
            refs.append((src, lineno, col))
            if key == "ptrans":
                try:
                    mu = parse_distribution(target)
                except (ValueError, ModelError) as exc:
                    raise ModelSyntaxError(str(exc), lineno, col + m.start(3)) from None
                if mu.mass != 1:
                    raise ModelSyntaxError(f"distribution mass {mu.mass} ≠ 1", lineno, col + m.start(3))
                refs.extend((s, lineno, col + m.start(3)) for s in mu.support)
                try:
                    act = visible(label)
                except ModelError as exc:
                    raise ModelSyntaxError(str(exc), lineno, col + m.start(2)) from None
                ptrans.append((src, act, mu))
            else:
                try:
                    r = parse_number(label)
                except ValueError as exc:
                    raise ModelSyntaxError(str(exc), lineno, col + m.start(2)) from None
                if r <= 0:
                    raise ModelSyntaxError(f"nonpositive rate {r}", lineno, col + m.start(2))
                if not _NAME_RE.match(target):
                    raise ModelSyntaxError(f"bad state name {target!r}", lineno, col + m.start(3))
                refs.append((target, lineno, col + m.start(3)))
                mtrans.append((src, r, target))
        else:
            raise ModelSyntaxError(f"unknown keyword {key!r}", lineno, indent + 1)

    if states is None:
        raise ModelSyntaxError("missing 'states:' line", 1)
    known = set(states)
    for s, lineno, col in refs:
        if s not in known:
            raise ModelSyntaxError(f"unknown state {s!r}", lineno, col)
    if init is None:
        init = states[0]
    return MarkovAutomaton(states=states, ptrans=ptrans, mtrans=mtrans, init=init, actions=frozenset(actions), name=name)


def serialize_model(ma: MarkovAutomaton) -> str:
    lines = [f"ma {ma.name}", "states: " + ", ".join(ma.states), f"init: {ma.init}"]
    declared = sorted(ma.actions)
    if declared:
        lines.append("actions: " + ", ".join(declared))
    for src, a, mu in ma.ptrans:
        target = "{ " + ", ".join(f"{p}: {s}" for s, p in mu.items()) + " }"
        lines.append(f"ptrans: {src} --{a}--> {target}")
    for src, r, tgt in ma.mtrans:
        lines.append(f"mtrans: {src} --{r}--> {tgt}")
    return "\n".join(lines) + "\n"


def load_model(path) -> MarkovAutomaton:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())
