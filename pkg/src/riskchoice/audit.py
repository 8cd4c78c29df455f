"""Dominance audit of a design: pairwise FOSD/SOSD, near-dominance, CDF and
CDF-area tables, and a check of the built-in reference tables against exact
computation."""

from __future__ import annotations

import itertools
from fractions import Fraction

from .design import ExperimentDesign, computed_label, taxonomy_disagreements
from .lottery import (
    DominanceKind,
    Lottery,
    cdf_area_at,
    cdf_at,
    check_fosd,
    check_sosd,
    expected_value,
    first_upcrossing,
    near_dominance_report,
)

F = Fraction

# Intervals of the CDF table and the lotteries it covers.
CDF_INTERVALS = ((0, 9), (9, 10), (10, 20), (20, 24), (24, None))
CDF_LOTTERIES = ("A1", "A2", "C1", "C2", "D")
AREA_LOTTERIES = ("A1", "B1", "B2", "D")
AREA_POINTS = tuple(range(1, 25))

# Printed reference values for the built-in design (CDF per interval, then EV).
REFERENCE_CDF_TABLE = {
    "A1": (F("0.1"), F("0.1"), F("0.7"), F(1), F(1), F(12)),
    "A2": (F("0.2"), F("0.2"), F("0.7"), F(1), F(1), F(11)),
    "C1": (F("0.625"), F("0.625"), F("0.775"), F(1), F(1), F(6)),
    "C2": (F("0.625"), F("0.825"), F("0.825"), F("0.825"), F(1), F(6)),
    "D": (F("0.15"), F("0.15"), F("0.65"), F(1), F(1), F(12)),
}

# Printed CDF-area reference at x = 1..24.
REFERENCE_AREA_TABLE = {
    "A1": tuple(F(s) for s in (
        "0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8 0.9 1.0 1.7 2.4 3.1 3.8 4.5 5.2 5.9 6.6 7.3 "
        "8.0 9.0 10.0 11.0 12.0").split()),
    "B1": tuple(F(s) for s in (
        "0.25 0.50 0.75 1.00 1.25 1.50 1.75 2.00 2.25 2.50 3.05 3.60 4.15 4.70 5.25 "
        "5.80 6.35 6.90 7.45 8.0 9.0 10.0 11.0 12.0").split()),
    "B2": tuple(F(s) for s in (
        "0.25 0.50 0.75 1.00 1.25 1.50 1.75 2.00 2.25 2.25 2.90 3.55 4.20 4.85 5.50 "
        "6.15 6.80 7.45 8.10 8.75 9.40 10.05 10.70 11.35").split()),
    "D": tuple(F(s) for s in (
        "0.15 0.30 0.45 0.60 0.75 0.90 1.05 1.20 1.35 1.50 2.15 2.80 3.45 4.10 4.75 "
        "5.40 6.05 6.70 7.35 8.0 9.0 10.0 11.0 12.0").split()),
}


def _s(x: Fraction | None) -> str | None:
    return None if x is None else str(x)


def _pt(x: Fraction) -> str:
    """Stable text for a rational: integer, finite decimal, or p/q."""
    return str(x)


def cdf_table(lotteries: dict[str, Lottery], ids=CDF_LOTTERIES, intervals=CDF_INTERVALS) -> dict:
    out = {}
    for lid in ids:
        p = lotteries[lid]
        out[lid] = [cdf_at(p, lo) for lo, _ in intervals] + [expected_value(p)]
    return out


def area_table(lotteries: dict[str, Lottery], ids=AREA_LOTTERIES, points=AREA_POINTS) -> dict:
    return {lid: [cdf_area_at(lotteries[lid], x) for x in points] for lid in ids}


def shift_check(exact: list[Fraction], printed: tuple[Fraction, ...], points=AREA_POINTS) -> dict:
    """Rows where the printed column disagrees with exact values, and the rows
    where it instead matches the exact value one row earlier."""
    mismatched = [x for x, e, p in zip(points, exact, printed) if e != p]
    shifted = [
        points[i] for i in range(1, len(points))
        if printed[i] == exact[i - 1] and printed[i] != exact[i]
    ]
    return {"mismatched_rows": mismatched, "rows_equal_to_previous_exact": shifted}


def crossing_under_reference(lotteries, dominant: str, dominated: str) -> Fraction | None:
    """First point where the reference area gap turns positive, reading the
    printed columns as a piecewise-linear curve over x = 0..24."""
    if dominant not in REFERENCE_AREA_TABLE or dominated not in REFERENCE_AREA_TABLE:
        return None
    pts = [(F(0), F(0))] + [
        (F(x), a - b)
        for x, a, b in zip(AREA_POINTS, REFERENCE_AREA_TABLE[dominant], REFERENCE_AREA_TABLE[dominated])
    ]
    return first_upcrossing(pts)


def _relation_json(rel) -> dict:
    return {
        "kind": rel.kind.value,
        "dominant": rel.dominant,
        "dominated": rel.dominated,
        "witness": _s(rel.witness),
    }


def pairwise_matrix(design: ExperimentDesign) -> list[dict]:
    rows = []
    for a, b in itertools.combinations(design.lottery_ids, 2):
        p, q = design.lotteries[a], design.lotteries[b]
        fosd = check_fosd(p, q) or check_fosd(q, p)
        sosd = check_sosd(p, q) or check_sosd(q, p)
        rows.append({
            "pair": [a, b],
            "fosd": _relation_json(fosd),
            "sosd": _relation_json(sosd),
        })
    return rows


def _near_json(rep) -> dict:
    return {
        "dominant": rep.p,
        "dominated": rep.q,
        "kind": rep.kind.value,
        "top": _s(rep.top),
        "prefix_bound": _s(rep.prefix_bound),
        "holds_everywhere": rep.holds_everywhere,
        "crossings": [_s(c) for c in rep.crossings],
        "favourable_average": _s(rep.favourable_average),
        "adverse_average": _s(rep.adverse_average),
        "net_average": _s(rep.net_average),
        "net_gap": _s(rep.net_gap),
    }


def near_dominance_section(design: ExperimentDesign) -> list[dict]:
    """Near-dominance reports for every menu declared as nearly dominated,
    pairing its declared leader with each other lottery in the menu."""
    out = []
    seen = set()
    for mid in design.menu_order:
        label = design.declared.get(mid)
        if label is None or label.relation not in ("NEAR_FOSD", "NEAR_SOSD"):
            continue
        kind = DominanceKind.FOSD if label.relation == "NEAR_FOSD" else DominanceKind.SOSD
        for other in label.dominated:
            key = (label.dominant, other, kind)
            if key in seen:
                continue
            seen.add(key)
            rep = near_dominance_report(design.lotteries[label.dominant], design.lotteries[other], kind)
            out.append({"menu": mid, **_near_json(rep)})
    return out


def _table_json(table: dict) -> dict:
    return {k: [_pt(v) for v in vals] for k, vals in table.items()}


def run_dominance_audit(design: ExperimentDesign) -> dict:
    """Audit document for ``design``. Reference-table comparisons are
    included only when the design carries the lotteries they cover."""
    lots = design.lotteries
    doc: dict = {
        "design": design.name,
        "lotteries": {
            lid: {
                "support": [[_pt(z), _pt(m)] for z, m in lots[lid].support],
                "expected_value": _pt(expected_value(lots[lid])),
            }
            for lid in design.lottery_ids
        },
        "pairwise": pairwise_matrix(design),
        "menus": [
            {
                "menu": mid,
                "lotteries": sorted(design.menus[mid]),
                "declared": design.declared[mid].relation if mid in design.declared else None,
                "computed": computed_label(design, mid).relation,
                "computed_dominant": computed_label(design, mid).dominant,
            }
            for mid in design.menu_order
        ],
        "near_dominance": near_dominance_section(design),
        "taxonomy_disagreements": taxonomy_disagreements(design),
    }
    discrepancies = []
    if all(l in lots for l in CDF_LOTTERIES):
        exact = cdf_table(lots)
        doc["cdf_table"] = {
            "intervals": [[lo, hi] for lo, hi in CDF_INTERVALS],
            "exact": _table_json(exact),
        }
        for lid in CDF_LOTTERIES:
            bad = [i for i, (e, r) in enumerate(zip(exact[lid], REFERENCE_CDF_TABLE[lid])) if e != r]
            if bad:
                discrepancies.append({"table": "cdf", "lottery": lid, "columns": bad})
    if all(l in lots for l in AREA_LOTTERIES):
        exact = area_table(lots)
        doc["area_table"] = {
            "points": list(AREA_POINTS),
            "exact": _table_json(exact),
            "reference": _table_json(REFERENCE_AREA_TABLE),
        }
        for lid in AREA_LOTTERIES:
            chk = shift_check(exact[lid], REFERENCE_AREA_TABLE[lid])
            if chk["mismatched_rows"]:
                discrepancies.append({
                    "table": "area",
                    "lottery": lid,
                    **chk,
                    "exact_at_top": _pt(exact[lid][-1]),
                    "top_minus_expected_value": _pt(AREA_POINTS[-1] - expected_value(lots[lid])),
                })
        doc["reference_crossings"] = {
            f"{a}>{b}": _s(crossing_under_reference(lots, a, b))
            for a, b in (("A1", "B2"), ("D", "B2"), ("B1", "B2"))
        }
    doc["reference_discrepancies"] = discrepancies
    return doc
