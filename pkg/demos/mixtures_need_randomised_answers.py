"""A limit of deterministic answers: bisimilarity that a context breaks.

``q0`` and ``q1`` both let time pass at rate 1 and then sit in ``q0`` forever,
so they are early bisimilar. The context ``c0`` can do ``b`` (to ``c1`` or
back to itself) and also delays at rate 4, landing in ``c0`` or ``c1`` with
equal odds.

In the composition, a delay from ``q1|c0`` can produce a mixture in which
``q0|c0`` and ``q1|c0`` sit side by side. The opponent then plays a ``b`` move
from only part of that mixture. Matching it from a single ``q0|c0`` would
need that one state to pick both ``b`` moves in proportion, which is a
randomised choice. This checker answers with one move per state, so the
composed pair is told apart.

The same shape of argument explains why early bisimilarity is not always
contained in late bisimilarity on random models.
"""

from mabisim import check_ma, parallel_compose, parse_model

MODEL = """
ma pair
states: q0, q1
init: q0
mtrans: q0 --1--> q0
mtrans: q1 --1--> q0
"""

CONTEXT = """
ma context
states: c0, c1
init: c0
actions: b
ptrans: c0 --b--> { 1: c1 }
ptrans: c0 --b--> { 1: c0 }
mtrans: c0 --2--> c1
mtrans: c0 --2--> c0
"""


def main():
    ma, ctx = parse_model(MODEL), parse_model(CONTEXT)
    print("q0 ~ q1 on their own:", check_ma(ma, "early", "bisim", "q0", "q1").outcome.value)

    product = parallel_compose(ma, ctx)
    v = check_ma(product, "early", "bisim", "q0|c0", "q1|c0")
    print("q0|c0 ~ q1|c0:       ", v.outcome.value)

    node = v.counterexample
    while node:
        ch = node.get("challenge")
        if ch:
            print(f"  {node['pair'][0]} vs {node['pair'][1]}: {ch['action']} "
                  f"with mass {ch['rho']} from {ch['split']}")
        node = (node.get("failed_responses") or [None])[0]


if __name__ == "__main__":
    main()
