"""Iteration counts on the sticky loop as the self-loop mass grows.

Classic value iteration creeps towards 1/2 from below and its stopping
rule fires while still visibly wrong. Interval iteration is sound but
needs ever more sweeps as the loop gets stickier. The certified solver
closes the loop in one shot via the geometric series, at any mass.
"""

from fractions import Fraction

from ssgsolve.baselines import solve_bvi, solve_vi
from ssgsolve.model import parse_model
from ssgsolve.svi import solve_svi


def sticky_loop(p: Fraction):
    r = (1 - p) / 2
    return parse_model(
        f"ssg 1\nstates 3\ntarget 1\n"
        f"action 0 go\n0 {p}\n1 {r}\n2 {r}\n"
        f"action 1 loop\n1 1\naction 2 loop\n2 1\n"
    )


def main():
    eps = 1e-6
    print(f"{'p':>8} {'vi iters':>9} {'vi error':>10} {'bvi iters':>10} {'svi iters':>10}")
    for p in (Fraction(1, 2), Fraction(9, 10), Fraction(99, 100), Fraction(999, 1000)):
        g = sticky_loop(p)
        vi = solve_vi(g, eps)
        bvi = solve_bvi(g, eps)
        svi = solve_svi(g, eps)
        print(f"{str(p):>8} {vi.iterations:>9} {abs(vi.value[0] - 0.5):>10.2e} "
              f"{bvi.iterations:>10} {svi.iterations:>10}")
    print()
    print("vi stops early because successive sweeps move less than eps,")
    print("not because the value is known; its result carries sound=False.")
    g = sticky_loop(Fraction(99, 100))
    vi = solve_vi(g, eps)
    print(f"at p=99/100: vi reports {vi.value[0]:.8f}, true value is 0.5, "
          f"sound={vi.sound}")


if __name__ == "__main__":
    main()
