"""Random-utility implications tested on empirical choice frequencies.

All comparisons are between exact rationals; there are no tolerances.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .choices import ChoiceProbabilities
from .design import Triple

HALF = Fraction(1, 2)


class Transitivity(str, enum.Enum):
    WEAK = "weak"
    MODERATE = "moderate"
    STRONG = "strong"


@dataclass(frozen=True)
class StochasticViolation:
    axiom: str
    witness: dict

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "witness": self.witness}


def _s(x: Fraction) -> str:
    return str(x)


def check_regularity(
    P: ChoiceProbabilities, nested_pairs: Sequence[tuple[str, str]]
) -> list[StochasticViolation]:
    """``Pr(p, A) <= Pr(p, B)`` whenever ``p in B`` and ``B`` is inside ``A``."""
    out = []
    for small, big in nested_pairs:
        for p in sorted(P.menus[small]):
            pa, pb = P(p, big), P(p, small)
            if pa > pb:
                out.append(
                    StochasticViolation(
                        "regularity",
                        {"lottery": p, "larger_menu": big, "smaller_menu": small,
                         "p_larger": _s(pa), "p_smaller": _s(pb)},
                    )
                )
    return out


def _binary_prob(P: ChoiceProbabilities, p: str, menu: str, renormalize: bool) -> Fraction | None:
    raw = P(p, menu)
    if not renormalize:
        return raw
    act = P.active[menu]
    return None if act == 0 else raw / act


def check_stochastic_transitivity(
    P: ChoiceProbabilities,
    triples: Sequence[Triple],
    variant: Transitivity = Transitivity.WEAK,
    renormalize: bool = False,
) -> list[StochasticViolation]:
    """Weak/moderate/strong stochastic transitivity over every arrangement of
    every triple.

    Binary probabilities are raw frequencies over all rounds (deferrals are
    the residual mass) unless ``renormalize`` conditions on an active choice;
    arrangements touching an all-deferral menu are then skipped.
    """
    variant = Transitivity(variant)
    out = []
    for t in triples:
        for p, q, r in itertools.permutations(t.lotteries):
            pq, qr, pr = (t.menus[frozenset(x)] for x in ((p, q), (q, r), (p, r)))
            a = _binary_prob(P, p, pq, renormalize)
            b = _binary_prob(P, q, qr, renormalize)
            c = _binary_prob(P, p, pr, renormalize)
            if a is None or b is None or c is None:
                continue
            if a < HALF or b < HALF:
                continue
            bound = {
                Transitivity.WEAK: HALF,
                Transitivity.MODERATE: min(a, b),
                Transitivity.STRONG: max(a, b),
            }[variant]
            if c < bound:
                out.append(
                    StochasticViolation(
                        f"{variant.value}-stochastic-transitivity",
                        {"arrangement": [p, q, r], "p_pq": _s(a), "p_qr": _s(b),
                         "p_pr": _s(c), "bound": _s(bound)},
                    )
                )
    return out


def check_stochastic_decisiveness(P: ChoiceProbabilities) -> list[StochasticViolation]:
    return [
        StochasticViolation("stochastic-decisiveness", {"menu": m, "p_active": _s(P.active[m])})
        for m in sorted(P.active)
        if P.active[m] < 1
    ]
