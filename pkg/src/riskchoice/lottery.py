"""Exact money lotteries and stochastic-dominance computations.

Every quantity here is a :class:`fractions.Fraction`. Dominance checks never
touch floating point: CDFs are step functions and their integrals are
piecewise linear, so evaluating at the breakpoints of the joint support is
exact and sufficient.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

Number = Fraction | int | str


def as_fraction(value: Number) -> Fraction:
    """Coerce ints, Fractions and decimal/ratio strings to an exact Fraction.

    Floats are rejected on purpose: ``Fraction(0.1)`` is not one tenth.
    """
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}; pass a string or Fraction")
    return Fraction(value)


@dataclass(frozen=True)
class Lottery:
    """A finite lottery over non-negative money prizes.

    ``support`` holds ``(prize, mass)`` pairs with strictly increasing prizes
    and strictly positive masses summing to exactly one.
    """

    id: str
    support: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        if not self.support:
            raise ValueError(f"lottery {self.id}: empty support")
        prizes = [z for z, _ in self.support]
        if any(z < 0 for z in prizes):
            raise ValueError(f"lottery {self.id}: negative prize")
        if any(b <= a for a, b in zip(prizes, prizes[1:])):
            raise ValueError(f"lottery {self.id}: prizes must be distinct and ascending")
        if any(m <= 0 or m > 1 for _, m in self.support):
            raise ValueError(f"lottery {self.id}: masses must lie in (0, 1]")
        if sum(m for _, m in self.support) != 1:
            raise ValueError(f"lottery {self.id}: masses do not sum to 1")

    @classmethod
    def from_masses(cls, id: str, masses: Mapping[Number, Number]) -> "Lottery":
        """Build from a ``{prize: mass}`` mapping; zero masses are dropped."""
        pairs = sorted((as_fraction(z), as_fraction(m)) for z, m in masses.items())
        return cls(id, tuple((z, m) for z, m in pairs if m != 0))

    @property
    def prizes(self) -> tuple[Fraction, ...]:
        return tuple(z for z, _ in self.support)

    @property
    def low(self) -> Fraction:
        return self.support[0][0]

    @property
    def high(self) -> Fraction:
        return self.support[-1][0]

    def mass(self, prize: Number) -> Fraction:
        z = as_fraction(prize)
        for p, m in self.support:
            if p == z:
                return m
        return Fraction(0)

    def renamed(self, id: str) -> "Lottery":
        return Lottery(id, self.support)


class DominanceKind(str, enum.Enum):
    FOSD = "FOSD"
    SOSD = "SOSD"
    NONE = "NONE"


@dataclass(frozen=True)
class DominanceRelation:
    kind: DominanceKind
    dominant: str | None = None
    dominated: str | None = None
    # a point where the defining inequality is strict
    witness: Fraction | None = None

    def __bool__(self) -> bool:
        return self.kind is not DominanceKind.NONE


@dataclass(frozen=True)
class NearDominanceReport:
    """How far a (first- or second-order) dominance condition of ``p`` over
    ``q`` extends from the bottom of the prize range.

    For FOSD the condition ``F_p <= F_q`` holds on ``[0, prefix_bound)``; for
    SOSD the integral condition holds on the closed ``[0, prefix_bound]``.
    ``favourable_average`` and ``adverse_average`` are length-weighted mean
    gaps on either side of the bound (only meaningful for FOSD), and
    ``net_average`` is the mean of ``F_q - F_p`` over the whole range, i.e.
    ``(EV(p) - EV(q)) / top``. For SOSD, ``net_gap`` is the integral gap
    ``int_0^top (F_p - F_q)`` at the top of the range.
    """

    p: str
    q: str
    kind: DominanceKind
    top: Fraction
    prefix_bound: Fraction
    holds_everywhere: bool
    crossings: tuple[Fraction, ...]
    favourable_average: Fraction | None
    adverse_average: Fraction | None
    net_average: Fraction
    net_gap: Fraction


def expected_value(p: Lottery) -> Fraction:
    return sum((z * m for z, m in p.support), Fraction(0))


def cdf_at(p: Lottery, x: Number) -> Fraction:
    """Right-continuous CDF ``F_p(x)``."""
    x = as_fraction(x)
    return sum((m for z, m in p.support if z <= x), Fraction(0))


def cdf_area_at(p: Lottery, x: Number) -> Fraction:
    """Exact ``int_0^x F_p(t) dt``.

    Each atom at ``z <= x`` contributes ``mass * (x - z)``.
    """
    x = as_fraction(x)
    if x < 0:
        raise ValueError("x must be non-negative")
    return sum((m * (x - z) for z, m in p.support if z <= x), Fraction(0))


def joint_top(p: Lottery, q: Lottery) -> Fraction:
    return max(p.high, q.high)


def breakpoints(*lotteries: Lottery) -> list[Fraction]:
    """Zero plus every prize of every lottery, sorted."""
    pts = {Fraction(0)}
    for lot in lotteries:
        pts.update(lot.prizes)
    return sorted(pts)


def _signed_dominance(diffs: Sequence[tuple[Fraction, Fraction]]) -> tuple[int, Fraction | None]:
    # +1: all diffs <= 0 with one < 0 (first argument dominates); -1: mirror.
    neg = next((x for x, d in diffs if d < 0), None)
    pos = next((x for x, d in diffs if d > 0), None)
    if neg is not None and pos is None:
        return 1, neg
    if pos is not None and neg is None:
        return -1, pos
    return 0, None


def check_fosd(p: Lottery, q: Lottery) -> DominanceRelation:
    """First-order dominance in whichever direction holds, if any."""
    diffs = [(x, cdf_at(p, x) - cdf_at(q, x)) for x in breakpoints(p, q)]
    sign, witness = _signed_dominance(diffs)
    if sign == 0:
        return DominanceRelation(DominanceKind.NONE)
    winner, loser = (p, q) if sign > 0 else (q, p)
    return DominanceRelation(DominanceKind.FOSD, winner.id, loser.id, witness)


def sosd_gap(p: Lottery, q: Lottery, x: Number) -> Fraction:
    """``int_0^x (F_p - F_q)``; non-positive everywhere when ``p`` SOSD ``q``."""
    return cdf_area_at(p, x) - cdf_area_at(q, x)


def check_sosd(p: Lottery, q: Lottery) -> DominanceRelation:
    """Second-order dominance on ``[0, max joint prize]``.

    The integrated CDF gap is linear between breakpoints, so its sign pattern
    on the whole interval is decided by its values at the breakpoints.
    """
    diffs = [(x, sosd_gap(p, q, x)) for x in breakpoints(p, q)]
    sign, witness = _signed_dominance(diffs)
    if sign == 0:
        return DominanceRelation(DominanceKind.NONE)
    winner, loser = (p, q) if sign > 0 else (q, p)
    return DominanceRelation(DominanceKind.SOSD, winner.id, loser.id, witness)


def strongest_dominance(p: Lottery, q: Lottery) -> DominanceRelation:
    rel = check_fosd(p, q)
    return rel if rel else check_sosd(p, q)


def first_upcrossing(points: Sequence[tuple[Fraction, Fraction]]) -> Fraction | None:
    """First ``x`` where a piecewise-linear function, given by its values at
    sorted knots, turns strictly positive after being non-positive.

    Returns ``None`` if the function never exceeds zero. Roots are solved
    exactly on the linear piece.
    """
    if points and points[0][1] > 0:
        return points[0][0]
    for (a, ga), (b, gb) in zip(points, points[1:]):
        if gb > 0 >= ga:
            return a + (-ga) * (b - a) / (gb - ga)
    return None


def sign_changes_linear(points: Sequence[tuple[Fraction, Fraction]]) -> list[Fraction]:
    """Points where a piecewise-linear function changes strict sign.

    A change that passes through a stretch of zeros is reported at the start
    of that stretch.
    """
    out: list[Fraction] = []
    last: tuple[int, Fraction, Fraction] | None = None  # sign, x, g of last nonzero knot
    zero_start: Fraction | None = None
    for x, g in points:
        s = (g > 0) - (g < 0)
        if s == 0:
            if last is not None and zero_start is None:
                zero_start = x
            continue
        if last is not None and s != last[0]:
            if zero_start is not None:
                out.append(zero_start)
            else:
                _, lx, lg = last
                out.append(lx + (-lg) * (x - lx) / (g - lg))
        last, zero_start = (s, x, g), None
    return out


def near_dominance_report(p: Lottery, q: Lottery, kind: DominanceKind) -> NearDominanceReport:
    """Extent of ``p``'s dominance over ``q`` from the bottom of the range."""
    top = joint_top(p, q)
    knots = breakpoints(p, q)
    net_average = (expected_value(p) - expected_value(q)) / top if top else Fraction(0)
    net_gap = sosd_gap(p, q, top)
    if kind is DominanceKind.FOSD:
        steps = [(x, cdf_at(p, x) - cdf_at(q, x)) for x in knots]
        bad = next((x for x, d in steps if d > 0), None)
        bound = top if bad is None else bad
        crossings = []
        prev = 0
        for x, d in steps:
            s = (d > 0) - (d < 0)
            if s and prev and s != prev:
                crossings.append(x)
            if s:
                prev = s
        favourable = -sosd_gap(p, q, bound) / bound if bound else None
        adverse = (
            (sosd_gap(p, q, top) - sosd_gap(p, q, bound)) / (top - bound) if top > bound else None
        )
        return NearDominanceReport(
            p.id, q.id, kind, top, bound, bad is None, tuple(crossings),
            favourable, adverse, net_average, net_gap,
        )
    if kind is DominanceKind.SOSD:
        pts = [(x, sosd_gap(p, q, x)) for x in knots]
        up = first_upcrossing(pts)
        bound = top if up is None else up
        return NearDominanceReport(
            p.id, q.id, kind, top, bound, up is None, tuple(sign_changes_linear(pts)),
            None, None, net_average, net_gap,
        )
    raise ValueError("kind must be FOSD or SOSD")


def mix(alpha: Number, p: Lottery, q: Lottery, id: str | None = None) -> Lottery:
    """The compound lottery ``alpha*p + (1-alpha)*q``."""
    a = as_fraction(alpha)
    if not 0 < a < 1:
        raise ValueError("mixing weight must lie strictly between 0 and 1")
    masses: dict[Fraction, Fraction] = {}
    for z, m in p.support:
        masses[z] = masses.get(z, Fraction(0)) + a * m
    for z, m in q.support:
        masses[z] = masses.get(z, Fraction(0)) + (1 - a) * m
    return Lottery.from_masses(id or f"{a}*{p.id}+{1 - a}*{q.id}", masses)


def same_distribution(p: Lottery, q: Lottery) -> bool:
    return p.support == q.support


def overlapping_range(p: Lottery, q: Lottery) -> bool:
    """True iff ``[p_low, p_high]`` and ``[q_low, q_high]`` meet in a
    non-degenerate interval."""
    return min(p.high, q.high) > max(p.low, q.low)


def load_lotteries_csv(path: str | Path) -> dict[str, Lottery]:
    """Read ``lottery_id, prize, prob_num, prob_den`` rows (one per atom)."""
    atoms: dict[str, dict[Fraction, Fraction]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"lottery_id", "prize", "prob_num", "prob_den"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for line, row in enumerate(reader, start=2):
            try:
                lid = row["lottery_id"].strip()
                prize = as_fraction(row["prize"].strip())
                mass = Fraction(int(row["prob_num"]), int(row["prob_den"]))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"{path}:{line}: {exc}") from None
            bucket = atoms.setdefault(lid, {})
            if prize in bucket:
                raise ValueError(f"{path}:{line}: duplicate prize {prize} for {lid}")
            bucket[prize] = mass
    out = {}
    for lid, masses in atoms.items():
        try:
            out[lid] = Lottery.from_masses(lid, masses)
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from None
    return out


def write_lotteries_csv(lotteries: Iterable[Lottery], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lottery_id", "prize", "prob_num", "prob_den"])
        for lot in lotteries:
            for z, m in lot.support:
                w.writerow([lot.id, str(z), m.numerator, m.denominator])
