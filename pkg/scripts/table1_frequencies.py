"""Empirical inclusion frequency per cover-value bucket against the closed form.

    python3 scripts/table1_frequencies.py --samples 10000 --seed 0
"""

from __future__ import annotations

import argparse

from dtpack.harness import verify_frequencies


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tolerance", type=float, default=0.02)
    args = ap.parse_args()
    doc = verify_frequencies(args.samples, args.seed, args.tolerance)
    print(f"{'bucket':<12} {'arcs':>4} {'expected':>9} {'observed':>9}")
    for bucket, v in doc.values.items():
        print(f"{bucket:<12} {v['arcs']:>4} {v['expected']:>9.4f} {v['mean_frequency']:>9.4f}")
    for arc in doc.witnesses["arcs"]:
        print(f"  arc {arc['arc']:>2}  c={arc['c']:<5} p={arc['p']:<5} freq={arc['frequency']:.4f}")
    for check in doc.checks:
        print(f"{check['status'].upper():<7} {check['name']} {check.get('detail', '')}".rstrip())


if __name__ == "__main__":
    main()
