"""Command-line front end.

Exit codes: 0 equivalent or success, 1 distinguished (or a failing corpus
claim), 2 usage or model errors, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .composition import parallel_compose
from .convergence import convergent_states
from .corpus import corpus, replay
from .dot import to_dot
from .equivalence import DEFAULT_BUDGET, BudgetExceeded, Relation, RelationKind, check_ma
from .model import ModelError
from .semantics import SemanticsKind, build_semantics
from .textformat import load_model, parse_distribution, serialize_model
from .weak import SearchBounds

EXIT_OK, EXIT_DISTINGUISHED, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mabisim", description="Weak bisimulation checking for Markov automata.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="parse and validate a model file")
    v.add_argument("file")

    s = sub.add_parser("semantics", help="build the early or late MLTS of a model")
    s.add_argument("--model", required=True)
    s.add_argument("--kind", choices=[k.value for k in SemanticsKind], default="early")
    s.add_argument("--dot", help="write Graphviz output here instead of listing transitions")

    c = sub.add_parser("check", help="compare two states or distributions")
    c.add_argument("--model", required=True)
    c.add_argument("--semantics", choices=[k.value for k in SemanticsKind], default="early")
    c.add_argument("--relation", choices=[r.value for r in Relation], default="bisim")
    c.add_argument("--divergence-sensitive", action="store_true")
    c.add_argument("--lhs", required=True, help="state name or literal such as {1/2:s1,1/2:s2}")
    c.add_argument("--rhs", required=True)
    c.add_argument("--grid-denominator", type=_positive, default=SearchBounds().grid_denominator)
    c.add_argument("--tau-depth", type=_positive, default=SearchBounds().tau_depth)
    c.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="maximum number of explored pairs")
    c.add_argument("--json", action="store_true")
    c.add_argument("--explain", action="store_true", help="log every challenge and response to stderr")

    m = sub.add_parser("compose", help="parallel composition of two models")
    m.add_argument("--left", required=True)
    m.add_argument("--right", required=True)
    m.add_argument("--sync", help="comma-separated actions to synchronise on (default: shared actions)")
    m.add_argument("--out", required=True)

    k = sub.add_parser("corpus", help="bundled example models")
    ksub = k.add_subparsers(dest="corpus_command", required=True)
    run = ksub.add_parser("run", help="replay every documented claim")
    run.add_argument("--json", action="store_true")
    ksub.add_parser("list", help="list entries and their claims")
    dump = ksub.add_parser("dump", help="write every entry as a model file")
    dump.add_argument("--dir", required=True)
    return p


def _cmd_validate(args) -> int:
    ma = load_model(args.file)
    conv = convergent_states(ma)
    print(f"{ma.name}: {len(ma.states)} states, {len(ma.ptrans)} probabilistic and "
          f"{len(ma.mtrans)} Markovian transitions")
    divergent = [s for s in ma.states if s not in conv]
    print("time-convergent" if not divergent else f"time-divergent states: {', '.join(divergent)}")
    return EXIT_OK


def _cmd_semantics(args) -> int:
    ma = load_model(args.model)
    m = build_semantics(ma, args.kind)
    if args.dot:
        Path(args.dot).write_text(to_dot(m), encoding="utf-8")
        print(f"wrote {args.dot} ({len(m.states)} states)")
    else:
        for s in m.states:
            for a, mu in m.out(s):
                print(f"{s} --{a}--> {mu.to_literal()}")
    return EXIT_OK


def _cmd_check(args) -> int:
    if args.explain:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        trace = logging.getLogger("mabisim.trace")
        trace.addHandler(handler)
        trace.setLevel(logging.DEBUG)
    ma = load_model(args.model)
    try:
        lhs, rhs = parse_distribution(args.lhs), parse_distribution(args.rhs)
    except ValueError as exc:
        raise ModelError(str(exc)) from None
    kind = RelationKind(Relation(args.relation), args.divergence_sensitive)
    bounds = SearchBounds(args.grid_denominator, args.tau_depth)
    try:
        verdict = check_ma(ma, args.semantics, kind, lhs, rhs, bounds, budget=args.budget)
    except BudgetExceeded as exc:
        if args.json:
            print(json.dumps({"outcome": "resource-limit", "budget": exc.budget, "stats": exc.stats}))
        else:
            print(f"resource limit: {exc}")
        return EXIT_RESOURCE
    if args.json:
        print(json.dumps(verdict.to_json(), indent=2))
    else:
        print(f"{args.lhs} vs {args.rhs}: {verdict.outcome.value} ({verdict.relation}, {verdict.semantics}, "
              f"{verdict.caveat.value})")
        if not verdict.equivalent:
            print(json.dumps(verdict.counterexample, indent=2))
    return EXIT_OK if verdict.equivalent else EXIT_DISTINGUISHED


def _cmd_compose(args) -> int:
    left, right = load_model(args.left), load_model(args.right)
    sync = None
    if args.sync is not None:
        sync = [a.strip() for a in args.sync.split(",") if a.strip()]
    product = parallel_compose(left, right, sync)
    Path(args.out).write_text(serialize_model(product), encoding="utf-8")
    print(f"wrote {args.out} ({len(product.states)} states)")
    return EXIT_OK


def _cmd_corpus(args) -> int:
    if args.corpus_command == "list":
        for e in corpus():
            print(f"{e.name}: {len(e.model.states)} states")
            for c in e.claims:
                print(f"  {c.describe()}" + (f"  # {c.note}" if c.note else ""))
        return EXIT_OK
    if args.corpus_command == "dump":
        out = Path(args.dir)
        out.mkdir(parents=True, exist_ok=True)
        for e in corpus():
            (out / f"{e.name}.ma").write_text(e.text, encoding="utf-8")
        print(f"wrote {len(corpus())} models to {out}")
        return EXIT_OK
    results = replay(on_result=None if args.json else (lambda r: print(r.line())))
    failed = [r for r in results if not r.passed]
    if args.json:
        print(json.dumps({
            "claims": [{"entry": r.entry, "claim": r.claim.describe(), "passed": r.passed,
                        "observed": r.observed, "wall_time_ms": r.wall_time_ms} for r in results],
            "passed": len(results) - len(failed), "failed": len(failed)}, indent=2))
    else:
        print(f"{len(results) - len(failed)}/{len(results)} claims hold")
    return EXIT_OK if not failed else EXIT_DISTINGUISHED


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    handlers = {"validate": _cmd_validate, "semantics": _cmd_semantics, "check": _cmd_check,
                "compose": _cmd_compose, "corpus": _cmd_corpus}
    try:
        return handlers[args.command](args)
    except (ModelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
