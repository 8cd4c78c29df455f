"""Violation detectors for the deterministic choice axioms.

All detectors take a :class:`~riskchoice.choices.Correspondence`, so the same
code serves merged correspondences and single-round choice functions (whose
values are singletons or empty).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .choices import Correspondence
from .design import DominancePair, ExperimentDesign, IndependencePair, Triple, mixture_map


class DeferralPolicy(str, enum.Enum):
    STRICT = "strict"  # empty choices take part in set-equality tests
    LENIENT = "lenient"  # fixtures touching an empty choice are skipped


class FosdMode(str, enum.Enum):
    STRICT_AXIOM = "strict-axiom"  # C({p,q}) must be exactly {p}
    DOMINATED_CHOICE = "dominated-choice"  # violation only if q is chosen without p


class RiskAttitude(str, enum.Enum):
    AVERSE = "risk-averse"
    SEEKING = "risk-seeking"
    NEUTRAL = "risk-neutral"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    witness: dict
    mode: str | None = None

    def to_json(self) -> dict:
        out = {"axiom": self.axiom, "witness": self.witness}
        if self.mode is not None:
            out["mode"] = self.mode
        return out


def _ids(s: Iterable[str]) -> list[str]:
    return sorted(s)


def check_decisiveness(C: Correspondence) -> list[AxiomViolation]:
    return [
        AxiomViolation("decisiveness", {"menu": m})
        for m in sorted(C.chosen)
        if not C.chosen[m]
    ]


def transitivity_arrangements(C: Correspondence, t: Triple) -> list[tuple[str, str, str]]:
    """Arrangements ``(p, q, r)`` with p in C(pq), q in C(qr) and p not in C(pr)."""
    bad = []
    for p, q, r in itertools.permutations(t.lotteries):
        pq, qr, pr = (t.menus[frozenset(x)] for x in ((p, q), (q, r), (p, r)))
        if pq not in C.chosen or qr not in C.chosen or pr not in C.chosen:
            continue
        if p in C[pq] and q in C[qr] and p not in C[pr]:
            bad.append((p, q, r))
    return bad


def check_transitivity(C: Correspondence, triples: Sequence[Triple]) -> list[AxiomViolation]:
    """One violation per violating triple; the witness lists every failing
    arrangement."""
    out = []
    for t in triples:
        bad = transitivity_arrangements(C, t)
        if bad:
            out.append(
                AxiomViolation(
                    "transitivity",
                    {
                        "triple": list(t.lotteries),
                        "arrangements": [list(a) for a in bad],
                        "menus": sorted(t.menus.values()),
                    },
                )
            )
    return out


def check_contraction(
    C: Correspondence, nested_pairs: Sequence[tuple[str, str]]
) -> list[AxiomViolation]:
    out = []
    for small, big in nested_pairs:
        if small not in C.chosen or big not in C.chosen:
            continue
        lost = C[big] & C.menus[small] - C[small]
        for p in _ids(lost):
            out.append(
                AxiomViolation(
                    "contraction",
                    {"lottery": p, "larger_menu": big, "smaller_menu": small,
                     "chosen_larger": _ids(C[big]), "chosen_smaller": _ids(C[small])},
                )
            )
    return out


def check_warp(C: Correspondence) -> list[AxiomViolation]:
    """Direct choice reversals: p chosen over q at A, q chosen at B containing p."""
    out = []
    menus = sorted(C.chosen)
    for a, b in itertools.permutations(menus, 2):
        ca, cb = C[a], C[b]
        rejected = C.menus[a] - ca
        for p in _ids(ca & C.menus[b]):
            for q in _ids(rejected & cb):
                out.append(
                    AxiomViolation("warp", {"p": p, "q": q, "menu_a": a, "menu_b": b})
                )
    return out


def check_fosd_choice(
    C: Correspondence, fosd_menus: Sequence[DominancePair], mode: FosdMode = FosdMode.STRICT_AXIOM
) -> list[AxiomViolation]:
    mode = FosdMode(mode)
    out = []
    for fm in fosd_menus:
        if fm.menu not in C.chosen:
            continue
        got = C[fm.menu]
        strict = got == frozenset((fm.dominated,))
        if mode is FosdMode.STRICT_AXIOM:
            bad = got != frozenset((fm.dominant,))
        else:
            # picking both only reveals indifference, which this mode tolerates
            bad = fm.dominated in got and fm.dominant not in got
        if bad:
            out.append(
                AxiomViolation(
                    "fosd",
                    {"menu": fm.menu, "dominant": fm.dominant, "dominated": fm.dominated,
                     "chosen": _ids(got), "strict": strict},
                    mode.value,
                )
            )
    return out


def check_independence(
    C: Correspondence,
    design: ExperimentDesign,
    pairs: Sequence[IndependencePair],
    policy: DeferralPolicy = DeferralPolicy.STRICT,
) -> list[AxiomViolation]:
    """The mixed-menu choice must be the image of the base-menu choice under
    the mixture map (covers: both empty, first/first, second/second, both/both).
    """
    policy = DeferralPolicy(policy)
    out = []
    for pair in pairs:
        if pair.base not in C.chosen or pair.mixed not in C.chosen:
            continue
        base, mixed = C[pair.base], C[pair.mixed]
        if policy is DeferralPolicy.LENIENT and (not base or not mixed):
            continue
        fmap = mixture_map(design, pair)
        if frozenset(fmap[x] for x in base) != mixed:
            out.append(
                AxiomViolation(
                    "independence",
                    {"base_menu": pair.base, "mixed_menu": pair.mixed,
                     "chosen_base": _ids(base), "chosen_mixed": _ids(mixed)},
                    policy.value,
                )
            )
    return out


def star_case(C: Correspondence, sp: DominancePair) -> str:
    got = C[sp.menu]
    if not got:
        return "empty"
    if got == frozenset((sp.dominant, sp.dominated)):
        return "both"
    return "dominant" if sp.dominant in got else "dominated"


_ATTITUDE = {
    "dominant": RiskAttitude.AVERSE,
    "dominated": RiskAttitude.SEEKING,
    "both": RiskAttitude.NEUTRAL,
}


@dataclass(frozen=True)
class StarOutcome:
    violations: list[AxiomViolation]
    attitude: RiskAttitude
    cases: dict = field(default_factory=dict)


def check_star(
    C: Correspondence,
    star_pairs: Sequence[DominancePair],
    policy: DeferralPolicy = DeferralPolicy.STRICT,
) -> StarOutcome:
    """Uniform case across every SOSD-ranked pair; one violation per pair of
    menus whose cases differ."""
    policy = DeferralPolicy(policy)
    cases = {sp.menu: star_case(C, sp) for sp in star_pairs if sp.menu in C.chosen}
    considered = [
        m for m in cases if not (policy is DeferralPolicy.LENIENT and cases[m] == "empty")
    ]
    out = []
    for a, b in itertools.combinations(considered, 2):
        if cases[a] != cases[b]:
            out.append(
                AxiomViolation(
                    "star",
                    {"menu_a": a, "case_a": cases[a], "menu_b": b, "case_b": cases[b]},
                    policy.value,
                )
            )
    kinds = {cases[m] for m in considered}
    attitude = RiskAttitude.UNCLASSIFIED
    if not out and len(kinds) == 1:
        attitude = _ATTITUDE.get(kinds.pop(), RiskAttitude.UNCLASSIFIED)
    return StarOutcome(out, attitude, cases)
