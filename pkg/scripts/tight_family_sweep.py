"""Exact tau_t / nu_t on planted carousel blocks, k = 1..K.

    python3 scripts/tight_family_sweep.py --max-k 4
"""

from __future__ import annotations

import argparse
import time
from fractions import Fraction

from dtpack.exact import solve_nu_t, solve_tau_t
from dtpack.generators import gen_planted_carousels
from dtpack.lp import certify_duality


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-k", type=int, default=4)
    args = ap.parse_args()
    print(f"{'k':>3} {'n':>4} {'nu_t':>5} {'tau_t':>6} {'nu*':>6} {'ratio':>6} {'secs':>7}")
    for k in range(1, args.max_k + 1):
        start = time.perf_counter()
        g = gen_planted_carousels(k)
        nu, tau = solve_nu_t(g), solve_tau_t(g)
        value = certify_duality(g).value
        ratio = Fraction(tau.weight) / nu.value
        flag = "" if nu.complete and tau.complete else "  (incomplete)"
        secs = time.perf_counter() - start
        print(f"{k:>3} {g.n:>4} {nu.value:>5} {str(tau.weight):>6} {str(value):>6} {str(ratio):>6} {secs:>7.2f}{flag}")


if __name__ == "__main__":
    main()
