"""Run an INI sweep and report the largest tau_t / nu_t and rounded / nu* seen.

    python3 scripts/ratio_probe.py configs/tournaments.ini --jobs 4
"""

from __future__ import annotations

import argparse
import dataclasses
import json
from pathlib import Path

from dtpack.harness import aggregate, load_config, rows_to_csv, run_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--jobs", type=int)
    args = ap.parse_args()
    config = load_config(args.config)
    if args.jobs:
        config = dataclasses.replace(config, jobs=args.jobs)
    rows, _ = run_experiment(config)
    if config.csv:
        Path(config.csv).parent.mkdir(parents=True, exist_ok=True)
        Path(config.csv).write_text(rows_to_csv(rows), encoding="utf-8")
    ranked = sorted((r for r in rows if r["tau_over_nu"]), key=lambda r: float(r["tau_over_nu"]), reverse=True)
    for r in ranked[:10]:
        print(f"{r['instance']:<32} nu_t={r['nu_t']:<3} tau_t={r['tau_t']:<4} ratio={r['tau_over_nu']}")
    print(json.dumps(aggregate(rows), indent=2))


if __name__ == "__main__":
    main()
