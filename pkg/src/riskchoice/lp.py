"""Exact rational feasibility for small linear systems.

Phase-I simplex on a dense tableau with Bland's rule, so it terminates and
never rounds. Systems here have a handful of variables and a few dozen rows.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

try:  # gmpy2 rationals are ~8x faster than Fraction and exact all the same
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

Row = Sequence[Fraction]


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def find_feasible_point(
    ge_rows: Sequence[Row],
    ge_rhs: Sequence[Fraction],
    eq_rows: Sequence[Row] = (),
    eq_rhs: Sequence[Fraction] = (),
    n_vars: int | None = None,
) -> list[Fraction] | None:
    """A vertex ``x >= 0`` with ``G x >= g`` and ``E x = e``, or ``None``."""
    if n_vars is None:
        n_vars = len((list(ge_rows) + list(eq_rows))[0]) if (ge_rows or eq_rows) else 0
    rows: list[list] = []
    rhs: list = []
    n_ge = len(ge_rows)
    m = n_ge + len(eq_rows)
    if m == 0:
        return [Fraction(0)] * n_vars
    # columns: original vars | surplus (one per >= row) | artificial (one per row)
    width = n_vars + n_ge + m
    for i, (r, b) in enumerate(list(zip(ge_rows, ge_rhs)) + list(zip(eq_rows, eq_rhs))):
        row = [_Q(0)] * width
        for j, v in enumerate(r):
            row[j] = _Q(v)
        if i < n_ge:
            row[n_vars + i] = _Q(-1)
        b = _Q(b)
        if b < 0:
            row = [-v for v in row]
            b = -b
        row[n_vars + n_ge + i] = _Q(1)
        rows.append(row)
        rhs.append(b)
    basis = [n_vars + n_ge + i for i in range(m)]
    # phase-I objective: minimise sum of artificials; reduced costs
    cost = [_Q(0)] * width
    obj = _Q(0)
    for row, b in zip(rows, rhs):
        for j in range(n_vars + n_ge):
            cost[j] -= row[j]
        obj -= b
    n_real = n_vars + n_ge
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        leave = -1
        for i, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave < 0:  # unbounded direction cannot occur in phase I
            break
        prow = rows[leave]
        piv = prow[enter]
        if piv != 1:
            prow = [v / piv for v in prow]
            rows[leave] = prow
            rhs[leave] = rhs[leave] / piv
        nz = [j for j, v in enumerate(prow) if v != 0]
        for i, row in enumerate(rows):
            if i == leave:
                continue
            f = row[enter]
            if f != 0:
                for j in nz:
                    row[j] -= f * prow[j]
                rhs[i] -= f * rhs[leave]
        f = cost[enter]
        for j in nz:
            cost[j] -= f * prow[j]
        obj -= f * rhs[leave]
        basis[leave] = enter
    if obj != 0:
        return None
    x = [Fraction(0)] * n_vars
    for i, col in enumerate(basis):
        if col < n_vars:
            x[col] = _to_fraction(rhs[i])
        elif col >= n_real and rhs[i] != 0:  # pragma: no cover - obj == 0 rules this out
            return None
    return x
