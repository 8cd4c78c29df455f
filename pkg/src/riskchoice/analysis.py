"""Per-subject analysis and aggregate tables for a whole dataset."""

from __future__ import annotations

import csv
import itertools
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .axioms import (
    DeferralPolicy,
    FosdMode,
    check_contraction,
    check_decisiveness,
    check_fosd_choice,
    check_independence,
    check_star,
    check_transitivity,
    check_warp,
    transitivity_arrangements,
)
from .choices import ChoiceDataset, estimate_probabilities, merge_correspondence, slice_rounds
from .design import ExperimentDesign, Fixtures, Taxonomy, taxonomy_disagreements
from .eu import classify_eum, eu_rationalizable
from .hm import HmMode, HmPolicy, engine_for, hm_score
from .stats import fisher_exact_2x2, mann_whitney_u, spearman_rho
from .stochastic import (
    Transitivity,
    check_regularity,
    check_stochastic_decisiveness,
    check_stochastic_transitivity,
)

DETERMINISTIC_AXIOMS = (
    "decisiveness", "transitivity", "contraction", "warp", "fosd", "independence", "star",
)
STOCHASTIC_AXIOMS = (
    "stochastic-decisiveness", "regularity",
    "weak-stochastic-transitivity", "moderate-stochastic-transitivity",
    "strong-stochastic-transitivity",
)
ROUND_FLAGS = ("is_um", "is_approx_um", "is_active_um", "is_eum_binary", "is_eum_all")


@dataclass(frozen=True)
class AnalysisOptions:
    policy: DeferralPolicy = DeferralPolicy.STRICT
    fosd_mode: FosdMode = FosdMode.DOMINATED_CHOICE
    taxonomy: Taxonomy = Taxonomy.DECLARED
    merge_threshold: Fraction = Fraction(0)
    renormalize_stochastic: bool = False
    approx_threshold: int = 1

    @property
    def hm_policy(self) -> HmPolicy:
        return HmPolicy.PENALIZE if self.policy is DeferralPolicy.STRICT else HmPolicy.ACTIVE_ONLY

    def to_json(self) -> dict:
        return {
            "policy": self.policy.value,
            "fosd_mode": self.fosd_mode.value,
            "taxonomy": self.taxonomy.value,
            "merge_threshold": str(self.merge_threshold),
            "renormalize_stochastic": self.renormalize_stochastic,
            "approx_threshold": self.approx_threshold,
        }


def share(k: int, n: int) -> dict:
    """Count, exact share and a percentage rounded half-up to 0.5 points."""
    if n == 0:
        return {"count": k, "of": n, "share": None, "percent": None}
    pct = Decimal(200 * k) / Decimal(n)
    half_points = pct.quantize(Decimal(1), rounding=ROUND_HALF_UP)
    rendered = half_points / 2
    text = f"{rendered:.1f}".removesuffix(".0")
    return {"count": k, "of": n, "share": str(Fraction(k, n)), "percent": f"{text}%"}


def _counts(violations) -> dict:
    out = {a: 0 for a in DETERMINISTIC_AXIOMS}
    for v in violations:
        out[v.axiom] += 1
    return out


def deterministic_violations(C, design: ExperimentDesign, fx: Fixtures, fosd_mode: FosdMode,
                             policy: DeferralPolicy):
    star = check_star(C, fx.star_pairs, policy)
    violations = [
        *check_decisiveness(C),
        *check_transitivity(C, fx.triples),
        *check_contraction(C, fx.nested_pairs),
        *check_warp(C),
        *check_fosd_choice(C, fx.fosd_menus, fosd_mode),
        *check_independence(C, design, fx.independence_pairs, policy),
        *star.violations,
    ]
    return violations, star


def _ms_mean(values: Sequence[float | None]) -> float | None:
    vals = [v for v in values if v is not None]
    return statistics.fmean(vals) if vals else None


def analyze_subject(design: ExperimentDesign, records, opts: AnalysisOptions) -> dict:
    fx = design.fixtures(opts.taxonomy)
    strict_engine = engine_for(design.lottery_ids, design.menus, HmMode.STRICT)
    weak_engine = engine_for(design.lottery_ids, design.menus, HmMode.WEAK)
    slices = slice_rounds(design, records)
    sid = slices[0].subject_id

    rounds = []
    for sl in slices:
        C = sl.as_correspondence()
        eum = classify_eum(
            C, design, fx, HmMode.STRICT, HmPolicy.PENALIZE, opts.policy,
            engine=strict_engine, approx_threshold=opts.approx_threshold,
        )
        active = hm_score(C, HmMode.STRICT, HmPolicy.ACTIVE_ONLY, engine=strict_engine)
        viol, _ = deterministic_violations(C, design, fx, opts.fosd_mode, opts.policy)
        per_triple = {
            "-".join(t.lotteries): bool(transitivity_arrangements(C, t)) for t in fx.triples
        }
        rts = list(sl.response_time_ms.values())
        rounds.append({
            "round": sl.round_index,
            "hm": eum.hm.score,
            "hm_active": active.score,
            "is_um": eum.is_um,
            "is_approx_um": eum.is_approx_um,
            "is_active_um": active.score == 0,
            "is_eum_binary": eum.is_eum_binary,
            "is_eum_all": eum.is_eum_all,
            "risk_attitude": eum.risk_attitude.value,
            "violations": _counts(viol),
            "intransitive_triples": per_triple,
            "deferrals": sum(1 for c in sl.choice.values() if c is None),
            "mean_response_time_ms": _ms_mean(rts),
            "response_times_ms": [v for v in rts if v is not None],
        })

    merged = merge_correspondence(slices, opts.merge_threshold)
    eum = classify_eum(
        merged, design, fx, HmMode.WEAK, opts.hm_policy, opts.policy,
        engine=weak_engine, approx_threshold=opts.approx_threshold,
    )
    viol, star = deterministic_violations(merged, design, fx, FosdMode.STRICT_AXIOM, opts.policy)
    fit = eu_rationalizable(merged, design.lotteries, opts.hm_policy)
    P = estimate_probabilities(slices)
    stoch = {
        "stochastic-decisiveness": check_stochastic_decisiveness(P),
        "regularity": check_regularity(P, fx.nested_pairs),
    }
    for variant in Transitivity:
        stoch[f"{variant.value}-stochastic-transitivity"] = check_stochastic_transitivity(
            P, fx.triples, variant, opts.renormalize_stochastic
        )
    by_axiom: dict[str, list] = {a: [] for a in DETERMINISTIC_AXIOMS}
    for v in viol:
        by_axiom[v.axiom].append(v.to_json())
    fosd_strict = any(w["witness"]["strict"] for w in by_axiom["fosd"])
    return {
        "subject_id": sid,
        "merged": {
            **eum.to_json(),
            "reveals_indifference": any(len(v) > 1 for v in merged.chosen.values()),
            "chosen": {m: sorted(merged.chosen[m]) for m in design.menu_order},
            "violation_counts": _counts(viol),
            "fosd_strict_violation": fosd_strict,
            "strict_binary_cycle": any(
                _strict_cycle(merged, t) for t in fx.triples
            ),
            "violations": by_axiom,
            "star_cases": star.cases,
            "eu_oracle": {
                "feasible": fit.feasible,
                "utilities": {str(z): str(u) for z, u in fit.utilities.items()},
                "conflict_menus": list(fit.conflict),
            },
            "stochastic_violation_counts": {a: len(stoch[a]) for a in STOCHASTIC_AXIOMS},
            "stochastic_violations": {a: [v.to_json() for v in stoch[a]] for a in STOCHASTIC_AXIOMS},
        },
        "rounds": rounds,
        "deferrals_per_menu": {
            m: sum(1 for sl in slices if sl.choice[m] is None) for m in design.menu_order
        },
    }


def _strict_cycle(C, t) -> bool:
    """p alone at pq, q alone at qr, r alone at pr for some arrangement."""
    for p, q, r in itertools.permutations(t.lotteries):
        pq, qr, pr = (t.menus[frozenset(x)] for x in ((p, q), (q, r), (p, r)))
        if C[pq] == {p} and C[qr] == {q} and C[pr] == {r}:
            return True
    return False


def _worker(args):
    design, records, opts = args
    return analyze_subject(design, records, opts)


def _median(xs: Sequence[float]):
    return statistics.median(xs) if xs else None


def _mean_fraction(xs: Sequence[int]) -> str | None:
    return str(Fraction(sum(xs), len(xs))) if xs else None


def _float(x):
    return None if x is None or x != x or x in (float("inf"), float("-inf")) else x


def _test(result) -> dict:
    return {k: _float(v) if isinstance(v, float) else v for k, v in result.to_json().items()}


def aggregate(design: ExperimentDesign, subjects: list[dict], fx: Fixtures) -> dict:
    n = len(subjects)
    R = max((len(s["rounds"]) for s in subjects), default=0)
    merged = [s["merged"] for s in subjects]

    def count(pred, rows) -> int:
        return sum(1 for r in rows if pred(r))

    # merged rationality, strict vs with indifferences
    table_merged = {}
    for key, flag in (("um", "is_um"), ("eum_binary", "is_eum_binary"), ("eum_all", "is_eum_all")):
        strict = count(lambda m: m[flag] and not m["reveals_indifference"], merged)
        indiff = count(lambda m: m[flag] and m["reveals_indifference"], merged)
        table_merged[key] = {
            "strict_preferences": share(strict, n),
            "with_indifferences": share(indiff, n),
            "total": share(strict + indiff, n),
        }
    attitudes: dict[str, int] = {}
    for m in merged:
        if m["is_eum_all"]:
            attitudes[m["risk_attitude"]] = attitudes.get(m["risk_attitude"], 0) + 1
    table_merged["eum_all_risk_attitudes"] = dict(sorted(attitudes.items()))
    table_merged["eu_oracle_feasible"] = share(count(lambda m: m["eu_oracle"]["feasible"], merged), n)
    table_merged["eum_all_not_eu_feasible"] = sorted(
        s["subject_id"] for s in subjects
        if s["merged"]["is_eum_all"] and not s["merged"]["eu_oracle"]["feasible"]
    )

    det = {
        a: share(count(lambda m, a=a: m["violation_counts"][a] == 0, merged), n)
        for a in DETERMINISTIC_AXIOMS
    }
    det_notes = {
        "fosd_strict_violators": count(lambda m: m["fosd_strict_violation"], merged),
        "strict_binary_cycles": count(lambda m: m["strict_binary_cycle"], merged),
    }
    stoch = {
        a: share(count(lambda m, a=a: m["stochastic_violation_counts"][a] == 0, merged), n)
        for a in STOCHASTIC_AXIOMS
    }
    last_four = lambda m: all(m["stochastic_violation_counts"][a] == 0 for a in STOCHASTIC_AXIOMS[1:])
    all_five = lambda m: all(m["stochastic_violation_counts"][a] == 0 for a in STOCHASTIC_AXIOMS)
    stoch["last_four"] = share(count(last_four, merged), n)
    stoch["all_five"] = share(count(all_five, merged), n)
    stoch["all_five_and_um"] = share(count(lambda m: all_five(m) and m["is_um"], merged), n)
    stoch["all_five_and_eum"] = share(count(lambda m: all_five(m) and m["is_eum_all"], merged), n)

    # per-round table
    per_round = []
    for r in range(R):
        rows = [s["rounds"][r] for s in subjects]
        hm = [x["hm"] for x in rows]
        hm_active = [x["hm_active"] for x in rows]
        rts = [t / 1000 for x in rows for t in x["response_times_ms"]]
        entry = {"round": r + 1}
        for flag in ROUND_FLAGS:
            entry[flag] = share(count(lambda x, f=flag: x[f], rows), n)
        entry["hm_mean"] = _mean_fraction(hm)
        entry["hm_median"] = _median(hm)
        entry["hm_active_mean"] = _mean_fraction(hm_active)
        entry["hm_active_median"] = _median(hm_active)
        entry["response_time_mean_s"] = statistics.fmean(rts) if rts else None
        entry["response_time_median_s"] = _median(rts)
        entry["violating"] = {
            a: share(count(lambda x, a=a: x["violations"][a] > 0, rows), n)
            for a in DETERMINISTIC_AXIOMS
        }
        per_round.append(entry)

    tests = {}
    if R >= 2:
        first, last = per_round[0], per_round[-1]

        def fisher(a: dict, b: dict) -> dict:
            return _test(fisher_exact_2x2(a["count"], n - a["count"], b["count"], n - b["count"]))

        for flag in ROUND_FLAGS:
            tests[flag] = fisher(first[flag], last[flag])
        for a in DETERMINISTIC_AXIOMS:
            tests[f"violating_{a}"] = fisher(first["violating"][a], last["violating"][a])
        for key in ("hm", "hm_active"):
            tests[key] = _test(mann_whitney_u(
                [s["rounds"][0][key] for s in subjects], [s["rounds"][-1][key] for s in subjects]
            ))
        rt1 = [s["rounds"][0]["mean_response_time_ms"] for s in subjects]
        rtR = [s["rounds"][-1]["mean_response_time_ms"] for s in subjects]
        rt1 = [x for x in rt1 if x is not None]
        rtR = [x for x in rtR if x is not None]
        tests["response_time"] = _test(mann_whitney_u(rt1, rtR)) if rt1 and rtR else None

    deferrals = []
    for mid in design.menu_order:
        deferrals.append({
            "menu": mid,
            "lotteries": sorted(design.menus[mid]),
            "unmerged": sum(s["deferrals_per_menu"][mid] for s in subjects),
            "merged": count(lambda m: not m["chosen"][mid], merged),
        })

    triples = []
    total_obs = n * R
    for t in fx.triples:
        key = "-".join(t.lotteries)
        k = sum(1 for s in subjects for x in s["rounds"] if x["intransitive_triples"][key])
        triples.append({"triple": list(t.lotteries), **share(k, total_obs)})
    ranked = sorted(triples, key=lambda e: (e["count"], e["triple"]))
    triple_tests = []
    for a, b in zip(ranked, ranked[1:]):
        res = fisher_exact_2x2(a["count"], total_obs - a["count"], b["count"], total_obs - b["count"])
        triple_tests.append({"pair": [a["triple"], b["triple"]], **_test(res)})

    stability = []
    for r in range(R - 1):
        entry = {"from_round": r + 1, "to_round": r + 2}
        for flag, key in (("is_um", "um"), ("is_eum_all", "eum")):
            base = count(lambda s, f=flag: s["rounds"][r][f], subjects)
            stay = count(lambda s, f=flag: s["rounds"][r][f] and s["rounds"][r + 1][f], subjects)
            entry[key] = share(stay, base)
        stability.append(entry)

    return {
        "n_subjects": n,
        "rounds": R,
        "merged": table_merged,
        "deterministic_axioms": {**det, **det_notes},
        "stochastic_axioms": stoch,
        "per_round": per_round,
        "first_vs_last_tests": tests,
        "deferrals_per_menu": deferrals,
        "intransitivity_per_triple": triples,
        "intransitivity_adjacent_tests": triple_tests,
        "stability": stability,
    }


class ConsistencyError(AssertionError):
    """Aggregate section disagrees with the per-subject entries."""


def check_consistency(report: dict) -> None:
    """Recount aggregate figures from the per-subject section."""
    subjects = [s for s in report["subjects"] if s["included"]]
    agg = report["aggregate"]
    n = len(subjects)
    if agg["n_subjects"] != n:
        raise ConsistencyError("n_subjects mismatch")
    for key, flag in (("um", "is_um"), ("eum_binary", "is_eum_binary"), ("eum_all", "is_eum_all")):
        k = sum(1 for s in subjects if s["merged"][flag])
        if agg["merged"][key]["total"]["count"] != k:
            raise ConsistencyError(f"merged {key} count mismatch")
    for r, entry in enumerate(agg["per_round"]):
        for flag in ROUND_FLAGS:
            k = sum(1 for s in subjects if s["rounds"][r][flag])
            if entry[flag]["count"] != k:
                raise ConsistencyError(f"round {r + 1} {flag} count mismatch")
            if flag == "is_eum_all":
                um = sum(1 for s in subjects if s["rounds"][r]["is_um"])
                if k > um:
                    raise ConsistencyError("EUM exceeds UM")
    for s in subjects:
        m = s["merged"]
        if m["is_eum_all"] and not (m["is_um"] and m["is_eum_binary"]):
            raise ConsistencyError(f"{s['subject_id']}: is_eum_all without its parts")
        c = m["stochastic_violation_counts"]
        if c["strong-stochastic-transitivity"] < c["moderate-stochastic-transitivity"] or \
                c["moderate-stochastic-transitivity"] < c["weak-stochastic-transitivity"]:
            raise ConsistencyError(f"{s['subject_id']}: stochastic transitivity nesting broken")


def run_dataset(
    dataset: ChoiceDataset,
    opts: AnalysisOptions = AnalysisOptions(),
    jobs: int = 1,
    attributes: dict[str, dict[str, float]] | None = None,
) -> dict:
    design = dataset.design
    complete = dataset.complete_subjects()
    work = [(design, s.records, opts) for s in complete]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            analysed = list(pool.map(_worker, work, chunksize=8))
    else:
        analysed = [_worker(w) for w in work]
    for entry in analysed:
        entry["included"] = True
    excluded = [
        {"subject_id": s.subject_id, "included": False, "problems": s.problems}
        for s in dataset.incomplete_subjects()
    ]
    fx = design.fixtures(opts.taxonomy)
    report = {
        "schema_version": 1,
        "config": {"options": opts.to_json()},
        "design": {
            "name": design.name,
            "lotteries": list(design.lottery_ids),
            "menus": {m: sorted(design.menus[m]) for m in design.menu_order},
            "rounds_expected": design.rounds_expected,
            "fixtures": {
                "fosd_menus": [asdict(p) for p in fx.fosd_menus],
                "star_pairs": [asdict(p) for p in fx.star_pairs],
                "triples": [list(t.lotteries) for t in fx.triples],
                "nested_pairs": [list(p) for p in fx.nested_pairs],
            },
            "taxonomy_disagreements": taxonomy_disagreements(design),
        },
        "excluded_subjects": [e["subject_id"] for e in excluded],
        "subjects": sorted(analysed + excluded, key=lambda s: s["subject_id"]),
    }
    report["aggregate"] = aggregate(design, analysed, fx)
    if attributes:
        report["aggregate"]["attribute_correlations"] = attribute_correlations(analysed, attributes)
    check_consistency(report)
    return report


def attribute_correlations(subjects: list[dict], attributes: dict[str, dict[str, float]]) -> dict:
    """Spearman correlation between each numeric attribute and merged HM."""
    out = {}
    columns = sorted({c for row in attributes.values() for c in row})
    for col in columns:
        pairs = [
            (attributes[s["subject_id"]][col], s["merged"]["hm"]["score"])
            for s in subjects
            if s["subject_id"] in attributes and col in attributes[s["subject_id"]]
        ]
        try:
            res = spearman_rho([p[0] for p in pairs], [p[1] for p in pairs])
            out[col] = _test(res)
        except ValueError as exc:
            out[col] = {"error": str(exc)}
    return out


def read_attributes(path: str | Path) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            sid = row.pop("subject_id").strip()
            vals = {}
            for k, v in row.items():
                try:
                    vals[k] = float(v)
                except (TypeError, ValueError):
                    continue
            out[sid] = vals
    return out


def subject_rows(report: dict) -> list[dict]:
    """Flat one-row-per-subject view for CSV export."""
    rows = []
    for s in report["subjects"]:
        row = {"subject_id": s["subject_id"], "included": s["included"]}
        if s["included"]:
            m = s["merged"]
            row.update({
                "merged_hm": m["hm"]["score"],
                "merged_is_um": m["is_um"],
                "merged_is_eum_binary": m["is_eum_binary"],
                "merged_is_eum_all": m["is_eum_all"],
                "risk_attitude": m["risk_attitude"],
                "reveals_indifference": m["reveals_indifference"],
                "eu_oracle_feasible": m["eu_oracle"]["feasible"],
            })
            for a in DETERMINISTIC_AXIOMS:
                row[f"merged_{a}_violations"] = m["violation_counts"][a]
            for a in STOCHASTIC_AXIOMS:
                row[f"{a}_violations"] = m["stochastic_violation_counts"][a]
            for r in s["rounds"]:
                i = r["round"]
                for key in ("hm", "hm_active", "is_um", "is_eum_all", "deferrals"):
                    row[f"round{i}_{key}"] = r[key]
        rows.append(row)
    return rows
