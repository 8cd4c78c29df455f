"""Enumeration of strict linear orders and weak orders (ordered set
partitions) over a small set of alternatives."""

from __future__ import annotations

import itertools
from math import comb
from typing import Iterator, Sequence

MAX_ITEMS = 9

LinearOrder = tuple[str, ...]
WeakOrder = tuple[tuple[str, ...], ...]


def _guard(n: int) -> None:
    if not 1 <= n <= MAX_ITEMS:
        raise ValueError(f"enumeration supports 1..{MAX_ITEMS} alternatives, got {n}")


def _items(items: int | Sequence[str]) -> tuple[str, ...]:
    if isinstance(items, int):
        _guard(items)
        return tuple(str(i) for i in range(items))
    out = tuple(items)
    _guard(len(out))
    if len(set(out)) != len(out):
        raise ValueError("alternatives must be distinct")
    return out


def ordered_bell(n: int) -> int:
    """Number of weak orders on ``n`` items: a(n) = sum_k C(n,k) a(n-k)."""
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


def enumerate_linear_orders(items: int | Sequence[str]) -> Iterator[LinearOrder]:
    """Permutations, best first, in lexicographic order of the sorted items."""
    yield from itertools.permutations(sorted(_items(items)))


def enumerate_weak_orders(items: int | Sequence[str]) -> Iterator[WeakOrder]:
    """Every ordered partition into indifference classes (best class first)
    exactly once. Classes are sorted tuples."""
    pool = tuple(sorted(_items(items)))

    def rec(rest: tuple[str, ...]) -> Iterator[WeakOrder]:
        if not rest:
            yield ()
            return
        for k in range(1, len(rest) + 1):
            for top in itertools.combinations(rest, k):
                remaining = tuple(x for x in rest if x not in top)
                for tail in rec(remaining):
                    yield (top, *tail)

    yield from rec(pool)
