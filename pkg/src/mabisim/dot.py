"""Graphviz export.

Solid edges carry the action (or rate) label. A transition whose target is
not a Dirac distribution goes to a small filled point, from which dashed
edges labelled with probabilities lead to the support states.
"""

from __future__ import annotations

from typing import Union

from .model import MarkovAutomaton, Mlts, state_str


def _q(text) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(system: Union[Mlts, MarkovAutomaton], name: str = None) -> str:
    name = name or system.name
    lines = [f"digraph {_q(name)} {{", "  rankdir=TB;", "  node [shape=circle];"]
    for s in system.states:
        lines.append(f"  {_q(state_str(s))};")
    if isinstance(system, MarkovAutomaton):
        edges = [(src, str(a), mu) for src, a, mu in system.ptrans]
    else:
        edges = [(src, str(a), mu) for src in system.states for a, mu in system.out(src)]
    for i, (src, label, mu) in enumerate(edges):
        if label.startswith("rate(") and label.endswith(")"):
            label = label[5:-1]
        if mu.is_dirac:
            lines.append(f"  {_q(state_str(src))} -> {_q(state_str(mu.support[0]))} [label={_q(label)}];")
            continue
        point = f"_d{i}"
        lines.append(f"  {point} [shape=point, width=0.08];")
        lines.append(f"  {_q(state_str(src))} -> {point} [label={_q(label)}, arrowhead=none];")
        for t, p in mu.items():
            lines.append(f"  {point} -> {_q(state_str(t))} [style=dashed, label={_q(p)}];")
    if isinstance(system, MarkovAutomaton):
        for src, r, tgt in system.mtrans:
            lines.append(f"  {_q(src)} -> {_q(tgt)} [label={_q(r)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
