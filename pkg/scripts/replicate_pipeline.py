#!/usr/bin/env python3
"""Simulate a 308-subject mixed population, analyse it, and print the
aggregate tables in a compact text form."""

import argparse
import tempfile
from pathlib import Path

from riskchoice.report import RunConfig, SimulationRun, dumps, run_analysis, run_simulation


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--population", default="uniform:100,eu-concave:60,eu-convex:40,noisy-eu:108")
    ap.add_argument("--seed", type=int, default=308)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", help="also write the full JSON report here")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        choices = Path(tmp) / "choices.csv"
        run_simulation(SimulationRun(population=args.population, seed=args.seed, out=str(choices),
                                     with_summary_scores=False))
        report = run_analysis(RunConfig(choices=str(choices), seed=args.seed, jobs=args.jobs))
    if args.out:
        Path(args.out).write_text(dumps(report), encoding="utf-8")

    agg = report["aggregate"]
    print(f"subjects: {agg['n_subjects']}")
    print("\nmerged:")
    for key in ("um", "eum_binary", "eum_all"):
        print(f"  {key:<11} {agg['merged'][key]['total']['percent']:>7}")
    print("\nper round:  " + "  ".join(f"R{i + 1:<5}" for i in range(len(agg["per_round"]))))
    for flag in ("is_um", "is_eum_binary", "is_eum_all"):
        print(f"  {flag:<15}" + "".join(f"{r[flag]['count']:<8}" for r in agg["per_round"]))
    print("\nfirst vs last round p-values:")
    for name, t in sorted(agg["first_vs_last_tests"].items()):
        print(f"  {name:<28} {'-' if t is None else t['p_value']}")
    print("\nintransitivities per triple:")
    for row in agg["intransitivity_per_triple"]:
        print("  ", row)


if __name__ == "__main__":
    main()
