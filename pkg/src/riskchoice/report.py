"""Run configuration, report emission and dataset simulation runs."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

import jsonschema
import numpy as np

from .analysis import AnalysisOptions, read_attributes, run_dataset, subject_rows
from .axioms import DeferralPolicy, FosdMode
from .choices import ChoiceDataError, load_choices, write_choice_records
from .design import ExperimentDesign, Taxonomy, builtin_design, load_design_dir
from .hm import HmMode, HmPolicy
from .simulate import (
    AgentSpec,
    ExpectedUtility,
    SimConfig,
    UniformRandom,
    UtilityFunction,
    hm_scores,
    score_percentile,
    simulate_dataset,
)


class ValidationError(ValueError):
    """Bad input: files, flags or population specs."""


@dataclass(frozen=True)
class RunConfig:
    choices: str | None = None
    design: str | None = None  # directory; None means the built-in design
    attributes: str | None = None
    policy: DeferralPolicy = DeferralPolicy.STRICT
    fosd_mode: FosdMode = FosdMode.DOMINATED_CHOICE
    taxonomy: Taxonomy = Taxonomy.DECLARED
    merge_threshold: Fraction = Fraction(0)
    renormalize_stochastic: bool = False
    out: str | None = None
    format: str = "json"
    seed: int = 0
    jobs: int = 1

    def options(self) -> AnalysisOptions:
        return AnalysisOptions(
            policy=DeferralPolicy(self.policy),
            fosd_mode=FosdMode(self.fosd_mode),
            taxonomy=Taxonomy(self.taxonomy),
            merge_threshold=Fraction(self.merge_threshold),
            renormalize_stochastic=self.renormalize_stochastic,
        )

    def to_json(self) -> dict:
        return {
            "choices": self.choices,
            "design": self.design,
            "attributes": self.attributes,
            "policy": DeferralPolicy(self.policy).value,
            "fosd_mode": FosdMode(self.fosd_mode).value,
            "taxonomy": Taxonomy(self.taxonomy).value,
            "merge_threshold": str(self.merge_threshold),
            "renormalize_stochastic": self.renormalize_stochastic,
            "format": self.format,
            "seed": self.seed,
        }


def resolve_design(path: str | None) -> ExperimentDesign:
    return builtin_design() if path is None else load_design_dir(path)


def report_schema() -> dict:
    text = resources.files("riskchoice").joinpath("data/report.schema.json").read_text("utf-8")
    return json.loads(text)


def _clean(obj):
    """NaN/inf are not JSON; map them to null."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def run_analysis(config: RunConfig) -> dict:
    if not config.choices:
        raise ValidationError("no choices file given")
    design = resolve_design(config.design)
    try:
        dataset = load_choices(design, config.choices)
    except (ChoiceDataError, OSError) as exc:
        raise ValidationError(str(exc)) from exc
    if not dataset.subjects:
        raise ValidationError(f"{config.choices}: no choice records")
    attributes = read_attributes(config.attributes) if config.attributes else None
    report = run_dataset(dataset, config.options(), jobs=config.jobs, attributes=attributes)
    report["config"]["run"] = config.to_json()
    report = _clean(report)
    jsonschema.validate(report, report_schema())
    return report


def render_report(report: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return dumps(report)
    if fmt == "csv":
        rows = subject_rows(report)
        columns: list[str] = []
        for r in rows:
            columns += [c for c in r if c not in columns]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    raise ValidationError(f"unknown format {fmt!r}")


# ------------------------------------------------------------ simulation runs

POPULATION_KINDS = ("uniform", "uniform-nodefer", "eu-linear", "eu-concave", "eu-convex",
                    "noisy-eu")


def parse_population(text: str) -> list[tuple[str, int]]:
    """``"uniform:100,eu-concave:50"`` -> [("uniform", 100), ("eu-concave", 50)]."""
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        kind, _, count = part.partition(":")
        kind = kind.strip()
        if kind not in POPULATION_KINDS:
            raise ValidationError(f"unknown agent kind {kind!r}; expected one of {POPULATION_KINDS}")
        try:
            n = int(count) if count else 1
        except ValueError as exc:
            raise ValidationError(f"bad agent count in {part!r}") from exc
        if n < 0:
            raise ValidationError(f"negative agent count in {part!r}")
        out.append((kind, n))
    return out


def build_specs(
    design: ExperimentDesign, population: Sequence[tuple[str, int]], seed: int, noise: float
) -> list[AgentSpec]:
    """One spec per agent; random utilities come from a stream separate from
    the choice stream so adding agents of one kind never perturbs another."""
    if noise < 0:
        raise ValidationError("noise must be non-negative")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    specs: list[AgentSpec] = []
    for kind, n in population:
        for _ in range(n):
            if kind == "uniform":
                specs.append(UniformRandom(True))
            elif kind == "uniform-nodefer":
                specs.append(UniformRandom(False))
            elif kind == "eu-linear":
                specs.append(ExpectedUtility(UtilityFunction.linear(design.prizes)))
            elif kind == "noisy-eu":
                u = UtilityFunction.random_shaped(design.prizes, rng, "concave")
                specs.append(ExpectedUtility(u, noise))
            else:
                shape = kind.removeprefix("eu-")
                specs.append(ExpectedUtility(UtilityFunction.random_shaped(design.prizes, rng, shape)))
    return specs


@dataclass(frozen=True)
class SimulationRun:
    population: str = "uniform:100"
    design: str | None = None
    rounds: int = 5
    seed: int = 0
    noise: float = 0.05
    out: str = "choices.csv"
    summary: str | None = None
    percentiles: tuple[float, ...] = (0.025, 0.05, 0.5)
    hm_mode: HmMode = HmMode.STRICT
    hm_policy: HmPolicy = HmPolicy.PENALIZE
    with_summary_scores: bool = True


def run_simulation(run: SimulationRun) -> dict:
    """Write a choices file and return (and optionally write) a JSON summary
    of the per-round HM score distribution."""
    design = resolve_design(run.design)
    population = parse_population(run.population)
    n = sum(k for _, k in population)
    if n < 1:
        raise ValidationError("population has no agents")
    try:
        config = SimConfig(design, n, run.rounds, run.seed)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    specs = build_specs(design, population, run.seed, run.noise)
    write_choice_records(simulate_dataset(config, specs), run.out)
    summary: dict = {
        "population": [{"kind": k, "count": c} for k, c in population],
        "n_agents": n,
        "rounds": run.rounds,
        "seed": run.seed,
        "noise": run.noise,
        "choices_file": str(run.out),
    }
    if run.with_summary_scores:
        scores = hm_scores(config, specs, HmMode(run.hm_mode), HmPolicy(run.hm_policy))
        values, counts = np.unique(scores, return_counts=True)
        summary["hm"] = {
            "mode": HmMode(run.hm_mode).value,
            "policy": HmPolicy(run.hm_policy).value,
            "n_scores": int(scores.size),
            "mean": float(scores.mean()),
            "distribution": {str(int(v)): int(c) for v, c in zip(values, counts)},
            "percentiles": {str(p): score_percentile(scores, p) for p in run.percentiles},
        }
    if run.summary:
        Path(run.summary).write_text(dumps(summary), encoding="utf-8")
    return summary
