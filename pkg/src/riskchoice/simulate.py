"""Synthetic agents: uniform-random choosers and expected-utility maximisers
(optionally with logit noise), plus the calibration and property suites
built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from .axioms import (
    DeferralPolicy,
    FosdMode,
    RiskAttitude,
    check_fosd_choice,
    check_independence,
    check_star,
)
from .choices import ChoiceRecord, Correspondence, build_dataset, slice_rounds
from .design import ExperimentDesign, Taxonomy
from .eu import eu_rationalizable
from .hm import HmMode, HmPolicy, engine_for, hm_score


@dataclass(frozen=True)
class UtilityFunction:
    """Utility values on a finite prize set; must be strictly increasing."""

    values: Mapping[Fraction, Fraction]

    def __post_init__(self) -> None:
        zs = sorted(self.values)
        if any(self.values[b] <= self.values[a] for a, b in zip(zs, zs[1:])):
            raise ValueError("utility must be strictly increasing over prizes")

    def expected(self, lottery) -> Fraction:
        return sum((m * self.values[z] for z, m in lottery.support), Fraction(0))

    @classmethod
    def linear(cls, prizes: Sequence[Fraction]) -> "UtilityFunction":
        return cls({Fraction(z): Fraction(z) for z in prizes})

    @classmethod
    def power(cls, prizes: Sequence[Fraction], exponent: str | Fraction) -> "UtilityFunction":
        """``x ** exponent`` rounded to a rational with a 10**9 denominator."""
        e = float(Fraction(exponent))
        return cls({
            Fraction(z): Fraction(round(float(z) ** e * 10**9), 10**9) for z in prizes
        })

    @classmethod
    def random_shaped(
        cls, prizes: Sequence[Fraction], rng: np.random.Generator, shape: str
    ) -> "UtilityFunction":
        """Random strictly increasing piecewise-linear utility that is strictly
        concave or strictly convex through the prize points.

        Slopes between consecutive prizes are distinct positive rationals,
        sorted decreasing (concave) or increasing (convex); values are then
        scaled to run from 0 to 1 so a logit noise scale means the same
        thing for every agent.
        """
        if shape not in ("concave", "convex"):
            raise ValueError("shape must be 'concave' or 'convex'")
        zs = sorted(Fraction(z) for z in prizes)
        k = len(zs) - 1
        draws: set[int] = set()
        while len(draws) < k:
            draws.add(int(rng.integers(1, 10**6)))
        slopes = sorted((Fraction(s, 10**4) for s in draws), reverse=shape == "concave")
        values = {zs[0]: Fraction(0)}
        for i in range(k):
            values[zs[i + 1]] = values[zs[i]] + slopes[i] * (zs[i + 1] - zs[i])
        top = values[zs[-1]]
        return cls({z: v / top for z, v in values.items()})  # u(min)=0, u(max)=1


@dataclass(frozen=True)
class UniformRandom:
    include_deferral: bool = True


@dataclass(frozen=True)
class ExpectedUtility:
    utility: UtilityFunction
    noise_scale: float = 0.0
    # exact EU ties go to the earliest id here; unlisted ids follow in id order
    tie_break: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be non-negative")


AgentSpec = UniformRandom | ExpectedUtility


@dataclass(frozen=True)
class SimConfig:
    design: ExperimentDesign
    n_agents: int
    rounds: int = 5
    seed: int = 0
    id_prefix: str = "S"

    def __post_init__(self) -> None:
        if self.n_agents < 1:
            raise ValueError("need at least one agent")
        if self.rounds < 1:
            raise ValueError("need at least one round")


def agent_seeds(seed: int, n: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(n)


def trial_sequence(design: ExperimentDesign, rounds: int, rng: np.random.Generator) -> list[str]:
    """First and last rounds in design order; everything in between
    reshuffled per agent."""
    order = list(design.menu_order)
    if rounds <= 2:
        return order * rounds
    middle = order * (rounds - 2)
    perm = rng.permutation(len(middle))
    return order + [middle[i] for i in perm] + order


def choose(
    spec: AgentSpec,
    design: ExperimentDesign,
    menu_id: str,
    rng: np.random.Generator,
    eu_cache: dict,
) -> str | None:
    items = sorted(design.menus[menu_id])
    if isinstance(spec, UniformRandom):
        options: list[str | None] = list(items)
        if spec.include_deferral:
            options.append(None)
        return options[int(rng.integers(len(options)))]
    eus = [eu_cache[x] for x in items]
    if spec.noise_scale == 0:
        best = max(eus)
        return min((x for x, v in zip(items, eus) if v == best), key=_priority(spec))
    noisy = np.array([float(v) for v in eus]) + spec.noise_scale * rng.gumbel(size=len(items))
    return items[int(np.argmax(noisy))]


def _priority(spec: ExpectedUtility):
    rank = {lid: i for i, lid in enumerate(spec.tie_break)}
    return lambda lid: (rank.get(lid, len(rank)), lid)


def simulate_agent(
    spec: AgentSpec, design: ExperimentDesign, subject_id: str, rounds: int, seed
) -> list[ChoiceRecord]:
    rng = np.random.default_rng(seed)
    eu_cache = {}
    if isinstance(spec, ExpectedUtility):
        eu_cache = {lid: spec.utility.expected(lot) for lid, lot in design.lotteries.items()}
    out = []
    for t, mid in enumerate(trial_sequence(design, rounds, rng), start=1):
        out.append(ChoiceRecord(subject_id, t, mid, choose(spec, design, mid, rng, eu_cache)))
    return out


def expand_specs(config: SimConfig, specs: Sequence[AgentSpec]) -> list[AgentSpec]:
    if len(specs) == 1:
        return list(specs) * config.n_agents
    if len(specs) != config.n_agents:
        raise ValueError("give one spec or exactly one per agent")
    return list(specs)


def subject_id(config: SimConfig, i: int) -> str:
    width = max(4, len(str(config.n_agents)))
    return f"{config.id_prefix}{i + 1:0{width}d}"


def simulate_dataset(config: SimConfig, specs: Sequence[AgentSpec]) -> Iterator[ChoiceRecord]:
    """Records in (agent, trial) order; reproducible from ``config.seed``."""
    seeds = agent_seeds(config.seed, config.n_agents)
    for i, (spec, ss) in enumerate(zip(expand_specs(config, specs), seeds)):
        yield from simulate_agent(spec, config.design, subject_id(config, i), config.rounds, ss)


def random_eu_spec(
    design: ExperimentDesign, rng: np.random.Generator, shape: str, noise_scale: float = 0.0
) -> ExpectedUtility:
    return ExpectedUtility(UtilityFunction.random_shaped(design.prizes, rng, shape), noise_scale)


def hm_scores(
    config: SimConfig,
    specs: Sequence[AgentSpec],
    mode: HmMode = HmMode.STRICT,
    policy: HmPolicy = HmPolicy.PENALIZE,
) -> np.ndarray:
    """Per-round HM scores of every simulated agent, pooled."""
    design = config.design
    engine = engine_for(design.lottery_ids, design.menus, mode)
    dataset = build_dataset(design, simulate_dataset(config, specs))
    scores = []
    for subj in dataset.complete_subjects():
        for sl in slice_rounds(design, subj.records):
            scores.append(hm_score(sl.as_correspondence(), mode, policy, engine=engine).score)
    return np.asarray(scores)


def score_percentile(scores: np.ndarray, percentile: float) -> int:
    """Smallest observed score whose empirical CDF reaches ``percentile``."""
    if not 0 <= percentile <= 1:
        raise ValueError("percentile must be a fraction in [0, 1]")
    return int(np.quantile(scores, percentile, method="inverted_cdf"))


def calibrate_hm_percentile(
    config: SimConfig,
    percentile: float = 0.025,
    specs: Sequence[AgentSpec] = (UniformRandom(),),
    mode: HmMode = HmMode.STRICT,
    policy: HmPolicy = HmPolicy.PENALIZE,
) -> dict:
    scores = hm_scores(config, specs, mode, policy)
    values, counts = np.unique(scores, return_counts=True)
    return {
        "percentile": percentile,
        "score": score_percentile(scores, percentile),
        "n_scores": int(scores.size),
        "mean": float(scores.mean()),
        "distribution": {int(v): int(c) for v, c in zip(values, counts)},
    }


@dataclass
class PropositionReport:
    n_agents: int = 0
    failures: list[dict] = field(default_factory=list)
    attitudes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures


def proposition1_suite(
    design: ExperimentDesign,
    n_agents: int,
    shape: str,
    seed: int = 0,
    taxonomy: Taxonomy = Taxonomy.DECLARED,
) -> PropositionReport:
    """Noiseless EU agents with random strictly concave (or convex) utility
    must pass StAR, FOSD and Independence, score 0 on HM and be
    EU-rationalisable, with the risk attitude matching the curvature."""
    fixtures = design.fixtures(taxonomy)
    engine = engine_for(design.lottery_ids, design.menus, HmMode.STRICT)
    expected = RiskAttitude.AVERSE if shape == "concave" else RiskAttitude.SEEKING
    report = PropositionReport()
    rngs = [np.random.default_rng(s) for s in agent_seeds(seed, n_agents)]
    for i, rng in enumerate(rngs):
        spec = random_eu_spec(design, rng, shape)
        eus = {lid: spec.utility.expected(lot) for lid, lot in design.lotteries.items()}
        chosen = {}
        for mid in design.menu_order:
            items = sorted(design.menus[mid])
            best = max(eus[x] for x in items)
            chosen[mid] = frozenset((next(x for x in items if eus[x] == best),))
        C = Correspondence(f"P{i}", design.menus, chosen)
        problems = []
        star = check_star(C, fixtures.star_pairs, DeferralPolicy.STRICT)
        if star.violations:
            problems.append("star")
        if star.attitude is not expected:
            problems.append(f"attitude={star.attitude.value}")
        if check_fosd_choice(C, fixtures.fosd_menus, FosdMode.STRICT_AXIOM):
            problems.append("fosd")
        if check_independence(C, design, fixtures.independence_pairs):
            problems.append("independence")
        if hm_score(C, HmMode.STRICT, engine=engine).score != 0:
            problems.append("hm")
        if not eu_rationalizable(C, design.lotteries, explain=False):
            problems.append("eu")
        report.attitudes[star.attitude.value] = report.attitudes.get(star.attitude.value, 0) + 1
        if problems:
            report.failures.append({
                "agent": i,
                "utility": {str(z): str(v) for z, v in spec.utility.values.items()},
                "problems": problems,
            })
        report.n_agents += 1
    return report
