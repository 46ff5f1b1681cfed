"""Early versus late semantics on a small race.

Three ways of reaching one of two visible outcomes:

* ``s`` waits (rate 2) and then flips an internal coin,
* ``t`` runs a race of two rate-1 delays,
* ``r`` flips the coin first and then waits (rate 2).

Early semantics fixes the race outcome when the delay starts, so ``r``'s coin
is visible ahead of time and ``r`` differs from the others. Late semantics
resolves the race after the delay, which makes all three equivalent.
"""

from mabisim import build_early, build_late, check_ma, parse_model

RACE = """
ma race
states: s, s', t, t1, t2, r, r1, r2
init: s
actions: a, b
ptrans: s' --tau--> { 1/2: t1, 1/2: t2 }
ptrans: r --tau--> { 1/2: r1, 1/2: r2 }
ptrans: t1 --a--> { 1: t1 }
ptrans: t2 --b--> { 1: t2 }
mtrans: s --2--> s'
mtrans: t --1--> t1
mtrans: t --1--> t2
mtrans: r1 --2--> t1
mtrans: r2 --2--> t2
"""


def show_transitions(title, m, state):
    print(title)
    for a, mu in m.out(state):
        print(f"  {state} --{a}--> {mu}")


def print_tree(node, indent="  "):
    """Print the challenge chain of a counterexample, one pair per line."""
    lhs, rhs = node["pair"]
    ch = node.get("challenge")
    if ch is None:
        print(f"{indent}{lhs} vs {rhs}")
        return
    print(f"{indent}{lhs} vs {rhs}: {node['side']} side plays {ch['action']} "
          f"with mass {ch['rho']} to {ch['result']}")
    for sub in node.get("failed_responses", [])[:1]:
        print_tree(sub, indent + "  ")


def main():
    ma = parse_model(RACE)
    show_transitions("early transitions of t:", build_early(ma), "t")
    show_transitions("late transitions of t:", build_late(ma), "t")
    print()

    for sem in ("early", "late"):
        for lhs, rhs in (("s", "t"), ("t", "r"), ("s", "r")):
            v = check_ma(ma, sem, "bisim", lhs, rhs)
            print(f"{sem:5} {lhs} ~ {rhs}: {v.outcome.value}")
    print()

    # a distinguishing verdict comes with a replayable game tree
    v = check_ma(ma, "early", "bisim", "t", "r")
    print("why early t and r differ:")
    print_tree(v.counterexample)


if __name__ == "__main__":
    main()
