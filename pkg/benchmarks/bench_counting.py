"""Compare the compiled and numpy point-counting kernels.

    python3 benchmarks/bench_counting.py [--repeat 3]

Both backends must return the same count; the table reports the best of
``--repeat`` runs for each (g, p, r).
"""

import argparse
import time
from fractions import Fraction

from qmjac import kernels
from qmjac.family import FamilyParams, build_family_poly
from qmjac.frobenius import count_points_raw, irreducible_modulus, reduce_mod_p

CASES = [
    (4, (Fraction(1, 2),), 41, 2),
    (4, (Fraction(1, 2),), 41, 3),
    (4, (Fraction(1, 2),), 73, 3),
    (4, (Fraction(1, 2),), 41, 4),
    (6, (Fraction(1, 2), Fraction(0)), 41, 3),
    (6, (Fraction(1, 2), Fraction(0)), 17, 4),
]


def best_time(fn, repeat):
    best, value = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return best, value


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    try:
        kernels.get_backend("cython")
    except ImportError:
        raise SystemExit("compiled kernels not built; run: python3 setup.py build_ext --inplace")

    print(f"{'g':>2} {'p':>4} {'r':>2} {'q':>10} {'count':>10} {'cython s':>9} {'numpy s':>9} {'speedup':>8}")
    for g, a, p, r in CASES:
        f_mod = reduce_mod_p(build_family_poly(FamilyParams.from_a(g, a)).f, p)
        modulus = irreducible_modulus(p, r, 0)
        tc, nc = best_time(lambda: count_points_raw(f_mod, p, r, modulus, backend="cython"), args.repeat)
        tn, nn = best_time(lambda: count_points_raw(f_mod, p, r, modulus, backend="numpy"), args.repeat)
        if nc != nn:
            raise SystemExit(f"backends disagree at g={g} p={p} r={r}: {nc} vs {nn}")
        print(f"{g:>2} {p:>4} {r:>2} {p**r:>10} {nc:>10} {tc:>9.3f} {tn:>9.3f} {tn / tc:>7.1f}x")


if __name__ == "__main__":
    main()
