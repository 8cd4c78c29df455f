"""Fisher's exact test, Mann-Whitney U and Spearman's rho.

Fisher's test uses exact integer hypergeometric weights. Mann-Whitney uses
the normal approximation with a tie-corrected variance and a continuity
correction. Spearman's rho is the Pearson correlation of midranks with a
t-approximation for the p-value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from scipy.special import stdtr


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    descriptors: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def to_json(self) -> dict:
        return {"statistic": self.statistic, "p_value": self.p_value, **self.descriptors}


def _hypergeom_weights(row1: int, col1: int, n: int) -> dict[int, int]:
    """Unnormalised probabilities C(col1, a) * C(n - col1, row1 - a) for each
    feasible top-left cell ``a`` given the margins."""
    lo, hi = max(0, row1 + col1 - n), min(row1, col1)
    return {a: math.comb(col1, a) * math.comb(n - col1, row1 - a) for a in range(lo, hi + 1)}


def fisher_exact_2x2(a: int, b: int, c: int, d: int) -> TestResult:
    """Two-sided Fisher's exact test for the table ``[[a, b], [c, d]]``.

    The p-value sums every table with the same margins that is no more
    likely than the observed one. Weights share a common denominator, so the
    comparison is exact.
    """
    if min(a, b, c, d) < 0 or any(int(x) != x for x in (a, b, c, d)):
        raise ValueError("cells must be non-negative integers")
    n = a + b + c + d
    row1, col1 = a + b, a + c
    desc = {"table": [[a, b], [c, d]]}
    if n == 0 or row1 in (0, n) or col1 in (0, n):
        return TestResult(float("nan") if n == 0 else 1.0, 1.0, desc)
    weights = _hypergeom_weights(row1, col1, n)
    observed = weights[a]
    total = sum(weights.values())
    tail = sum(w for w in weights.values() if w <= observed)
    odds = (a * d) / (b * c) if b * c else float("inf") if a * d else float("nan")
    return TestResult(odds, min(1.0, float(Fraction(tail, total))), desc)


def midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        r = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = r
        i = j + 1
    return ranks


def _tie_groups(values: Sequence[float]) -> list[int]:
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return list(counts.values())


def mann_whitney_u(sample1: Sequence[float], sample2: Sequence[float]) -> TestResult:
    """U for ``sample1`` (count of pairs where it ranks higher, ties half)."""
    n1, n2 = len(sample1), len(sample2)
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be non-empty")
    pooled = list(sample1) + list(sample2)
    ranks = midranks(pooled)
    r1 = sum(ranks[:n1])
    u1 = r1 - n1 * (n1 + 1) / 2
    n = n1 + n2
    mean = n1 * n2 / 2
    ties = sum(t**3 - t for t in _tie_groups(pooled))
    var = n1 * n2 / 12 * ((n + 1) - ties / (n * (n - 1))) if n > 1 else 0.0
    desc = {"n1": n1, "n2": n2}
    if var <= 0:
        return TestResult(u1, 1.0, desc)
    z = (abs(u1 - mean) - 0.5) / math.sqrt(var)
    p = math.erfc(max(z, 0.0) / math.sqrt(2))
    return TestResult(u1, min(1.0, p), {**desc, "z": z})


def spearman_rho(xs: Sequence[float], ys: Sequence[float]) -> TestResult:
    n = len(xs)
    if n != len(ys):
        raise ValueError("samples must be paired")
    if n < 3:
        raise ValueError("need at least three pairs")
    rx, ry = midranks(xs), midranks(ys)
    mx, my = sum(rx) / n, sum(ry) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    sxx = sum((a - mx) ** 2 for a in rx)
    syy = sum((b - my) ** 2 for b in ry)
    if sxx == 0 or syy == 0:
        raise ValueError("rank variance is zero; correlation undefined")
    rho = sxy / math.sqrt(sxx * syy)
    df = n - 2
    if abs(rho) >= 1:
        p = 0.0
    else:
        t = rho * math.sqrt(df / (1 - rho * rho))
        p = 2 * stdtr(df, -abs(t))
    return TestResult(rho, float(min(1.0, p)), {"n": n})
