"""Expected-utility classification and an exact LP rationalizability oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .axioms import (
    DeferralPolicy,
    FosdMode,
    RiskAttitude,
    check_fosd_choice,
    check_independence,
    check_star,
)
from .choices import Correspondence
from .design import ExperimentDesign, Fixtures
from .hm import HmEngine, HmMode, HmPolicy, HmResult, hm_score
from .lottery import Lottery
from .lp import find_feasible_point

EPSILON = Fraction(1, 10**6)
APPROX_UM_THRESHOLD = 1


@dataclass(frozen=True)
class EuFit:
    feasible: bool
    utilities: Mapping[Fraction, Fraction] = field(default_factory=dict)
    # menus that jointly admit no expected-utility rationalisation
    conflict: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.feasible


def _menu_rows(
    lotteries: Mapping[str, Lottery], chosen: frozenset, menu: frozenset, prizes: Sequence[Fraction]
) -> tuple[list, list]:
    """EU-difference rows for one menu over all prizes: ``>= eps`` against
    unchosen lotteries, ``= 0`` among chosen ones."""
    def diff(p: str, q: str) -> list[Fraction]:
        return [lotteries[p].mass(z) - lotteries[q].mass(z) for z in prizes]

    ge, eq = [], []
    ranked = sorted(chosen)
    for p in ranked:
        for q in sorted(menu - chosen):
            ge.append(diff(p, q))
    for p, p2 in zip(ranked, ranked[1:]):
        eq.append(diff(p, p2))
    return ge, eq


def _solve(groups: Sequence[tuple[list, list]], prizes: Sequence[Fraction], eps: Fraction):
    """Feasibility with u(min prize)=0, u(max prize)=1 substituted out."""
    n = len(prizes)
    free = list(range(1, n - 1))

    def reduce(row: Sequence[Fraction]) -> tuple[list[Fraction], Fraction]:
        # row . u with u[0] = 0, u[-1] = 1 -> (coefficients on free vars, constant)
        return [row[j] for j in free], row[-1]

    ge_rows, ge_rhs, eq_rows, eq_rhs = [], [], [], []
    seen = set()
    for k in range(1, n):  # strictly increasing: u_k - u_{k-1} >= eps
        row = [Fraction(0)] * n
        row[k], row[k - 1] = Fraction(1), Fraction(-1)
        coeffs, const = reduce(row)
        ge_rows.append(coeffs)
        ge_rhs.append(eps - const)
    for ge, eq in groups:
        for row in ge:
            coeffs, const = reduce(row)
            key = ("ge", tuple(coeffs), const)
            if key not in seen:
                seen.add(key)
                ge_rows.append(coeffs)
                ge_rhs.append(eps - const)
        for row in eq:
            coeffs, const = reduce(row)
            key = ("eq", tuple(coeffs), const)
            if key not in seen:
                seen.add(key)
                eq_rows.append(coeffs)
                eq_rhs.append(-const)
    x = find_feasible_point(ge_rows, ge_rhs, eq_rows, eq_rhs, n_vars=len(free))
    if x is None:
        return None
    return [Fraction(0), *x, Fraction(1)]


def eu_rationalizable(
    C: Correspondence,
    lotteries: Mapping[str, Lottery],
    policy: HmPolicy = HmPolicy.PENALIZE,
    epsilon: Fraction = EPSILON,
    explain: bool = True,
) -> EuFit:
    """Is there a strictly increasing utility over prizes whose expected
    utility rationalises every non-empty choice set?

    Chosen lotteries must tie exactly and beat every unchosen one by at
    least ``epsilon``. Under ``PENALIZE`` an empty choice is itself a
    rejection (a maximiser never defers); under ``ACTIVE_ONLY`` it is skipped.
    When infeasible and ``explain`` is set, a deletion filter over menus
    returns an irreducible conflicting subset.
    """
    policy = HmPolicy(policy)
    prizes = sorted({z for m in C.menus.values() for lid in m for z in lotteries[lid].prizes})
    if len(prizes) < 2:
        return EuFit(True, {z: Fraction(0) for z in prizes})
    empties = tuple(m for m in sorted(C.chosen) if not C[m])
    if empties and policy is HmPolicy.PENALIZE:
        return EuFit(False, {}, empties[:1])
    groups = {
        m: _menu_rows(lotteries, C[m], C.menus[m], prizes) for m in sorted(C.chosen) if C[m]
    }
    sol = _solve(list(groups.values()), prizes, epsilon)
    if sol is not None:
        return EuFit(True, dict(zip(prizes, sol)))
    if not explain:
        return EuFit(False)
    core = list(groups)
    for m in list(core):
        trial = [x for x in core if x != m]
        if _solve([groups[x] for x in trial], prizes, epsilon) is None:
            core = trial
    return EuFit(False, {}, tuple(core))


@dataclass(frozen=True)
class EumResult:
    hm: HmResult
    is_um: bool
    is_approx_um: bool
    fosd_ok: bool
    independence_ok: bool
    star_ok: bool
    risk_attitude: RiskAttitude

    @property
    def is_eum_binary(self) -> bool:
        return self.fosd_ok and self.independence_ok and self.star_ok

    @property
    def is_eum_all(self) -> bool:
        return self.is_um and self.is_eum_binary

    def to_json(self) -> dict:
        return {
            "hm": self.hm.to_json(),
            "is_um": self.is_um,
            "is_approx_um": self.is_approx_um,
            "is_eum_binary": self.is_eum_binary,
            "is_eum_all": self.is_eum_all,
            "fosd_ok": self.fosd_ok,
            "independence_ok": self.independence_ok,
            "star_ok": self.star_ok,
            "risk_attitude": self.risk_attitude.value,
        }


def classify_eum(
    C: Correspondence,
    design: ExperimentDesign,
    fixtures: Fixtures,
    mode: HmMode = HmMode.WEAK,
    policy: HmPolicy = HmPolicy.PENALIZE,
    deferral: DeferralPolicy = DeferralPolicy.STRICT,
    engine: HmEngine | None = None,
    approx_threshold: int = APPROX_UM_THRESHOLD,
) -> EumResult:
    """Ordinal HM gate plus the binary-menu FOSD / Independence / StAR gates.

    FOSD is checked in its strict form: the dominant lottery alone.
    """
    hm = hm_score(C, mode, policy, engine=engine)
    fosd = check_fosd_choice(C, fixtures.fosd_menus, FosdMode.STRICT_AXIOM)
    indep = check_independence(C, design, fixtures.independence_pairs, deferral)
    star = check_star(C, fixtures.star_pairs, deferral)
    return EumResult(
        hm=hm,
        is_um=hm.score == 0,
        is_approx_um=hm.score <= approx_threshold,
        fosd_ok=not fosd,
        independence_ok=not indep,
        star_ok=not star.violations,
        risk_attitude=star.attitude,
    )
