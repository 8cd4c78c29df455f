#!/usr/bin/env python3
"""Print a readable summary of the dominance audit for a design directory
(or the built-in design)."""

import argparse

from riskchoice.audit import run_dominance_audit
from riskchoice.report import resolve_design


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--design", help="design directory; default is built in")
    args = ap.parse_args()
    doc = run_dominance_audit(resolve_design(args.design))

    print("menu   declared    computed  dominant")
    for m in doc["menus"]:
        print(f"{m['menu']:<6} {str(m['declared']):<11} {m['computed']:<9} {m['computed_dominant'] or '-'}")

    print("\ntaxonomy disagreements:")
    for d in doc["taxonomy_disagreements"]:
        print(f"  {d['menu']} {'/'.join(d['lotteries'])}: declared {d['declared']}, "
              f"computed {d['computed']} ({d['computed_dominant']})")

    print("\nreference table discrepancies:")
    for d in doc["reference_discrepancies"] or [{"table": "none"}]:
        print("  ", d)
    if "reference_crossings" in doc:
        print("\nfirst crossing under the printed area table:")
        for k, v in doc["reference_crossings"].items():
            print(f"  {k}: {v}")


if __name__ == "__main__":
    main()
