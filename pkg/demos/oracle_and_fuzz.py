"""Exact answers at small scale, and using them to hunt for solver bugs.

The oracle enumerates both players' memoryless deterministic strategies
and solves the induced chains over the rationals, so its answers carry
no rounding at all. The fuzz loop generates random games, solves them
with every algorithm, and flags any value or bound that disagrees with
the oracle. Dropping the decision-value cap is a known way to go wrong;
the loop finds it immediately.
"""

from ssgsolve.fuzz import run_fuzz
from ssgsolve.oracle import exact_value
from ssgsolve.presets import asymmetric_ring, two_route_choice


def main():
    ring = asymmetric_ring()
    res = exact_value(ring)
    print("ring values, exactly:")
    for s, v in enumerate(res.values):
        print(f"  state {s}: {v}")
    print(f"({res.pairs_evaluated} strategy pairs enumerated)")
    print()

    rep = run_fuzz(50, seed=11)
    print(f"fuzzed 50 random games: {rep.checked} checked, "
          f"{len(rep.failures)} failures")
    print()

    # sabotage the solver: skip the cap that keeps bound updates honest
    rep = run_fuzz(0, 0, extra_models=(two_route_choice(),), algorithms=("svi",),
                   overrides={"svi": {"use_decision_values": False}})
    for ce in rep.failures:
        print(f"uncapped solver caught: {ce.reason}")


if __name__ == "__main__":
    main()
