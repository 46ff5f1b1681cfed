"""Why internal divergence matters once time can pass.

``s`` is stuck, ``r`` loops internally forever and ``t`` just lets time pass
at rate 1. On their own, ``s`` and ``r`` look alike: neither ever does
anything observable. Put next to ``t``, the difference shows. ``s|t`` lets
the delay fire, while ``r|t`` keeps taking internal steps and, under maximal
progress, never lets time pass at all.

The divergence-sensitive relation sees this without any context.
"""

from mabisim import Relation, RelationKind, check_ma, convergent_states, parallel_compose, parse_model
from mabisim.composition import restrict_init
from mabisim.semantics import build_early

TRIO = """
ma trio
states: s, r, t
init: s
ptrans: r --tau--> { 1: r }
mtrans: t --1--> t
"""


def main():
    trio = parse_model(TRIO)
    print("plain bisimilarity, s vs r:", check_ma(trio, "early", "bisim", "s", "r").outcome.value)

    product = parallel_compose(trio, restrict_init(trio, "t"))
    m = build_early(product)
    for state in ("s|t", "r|t"):
        moves = ", ".join(f"{a}->{mu}" for a, mu in m.out(state)) or "none"
        print(f"  {state}: {moves}")
    print("after composing with t:   ", check_ma(product, "early", "bisim", "s|t", "r|t").outcome.value)

    print("time-convergent states:   ", ", ".join(sorted(convergent_states(build_early(trio)))))
    sensitive = RelationKind(Relation.BISIM, True)
    print("divergence-sensitive s vs r:", check_ma(trio, "early", sensitive, "s", "r").outcome.value)


if __name__ == "__main__":
    main()
