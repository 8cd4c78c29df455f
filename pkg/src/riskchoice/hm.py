"""Houtman-Maks scores over strict linear orders or weak orders.

A menu is consistent with an order when the chosen set equals the order's
full set of maximal elements of the menu. The score is the fewest
inconsistent menus over all orders. At design scale (seven lotteries) the
exhaustive scan is a few thousand to ~47k orders, so every order is
evaluated and all minimisers are kept.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .choices import Correspondence
from .orders import enumerate_linear_orders, enumerate_weak_orders


class HmMode(str, enum.Enum):
    STRICT = "strict"
    WEAK = "weak"


class HmPolicy(str, enum.Enum):
    PENALIZE = "penalize"  # deferrals count as mistakes
    ACTIVE_ONLY = "active-only"  # deferral menus are not evaluated


class HmEngine:
    """Pre-computed maximal sets for every order and every menu."""

    def __init__(self, alternatives: Sequence[str], menus: Mapping[str, frozenset], mode: HmMode):
        self.mode = HmMode(mode)
        self.alternatives = tuple(sorted(alternatives))
        self.menu_ids = tuple(menus)
        self.menus = dict(menus)
        pos = {a: i for i, a in enumerate(self.alternatives)}
        self.bit = {a: 1 << i for a, i in pos.items()}
        if self.mode is HmMode.STRICT:
            orders = [tuple((x,) for x in lin) for lin in enumerate_linear_orders(self.alternatives)]
        else:
            orders = list(enumerate_weak_orders(self.alternatives))
        orders.sort()
        self.orders = orders
        ranks = np.empty((len(orders), len(self.alternatives)), dtype=np.int8)
        for k, order in enumerate(orders):
            for level, cls in enumerate(order):
                for a in cls:
                    ranks[k, pos[a]] = level
        self.maxsets = np.empty((len(orders), len(self.menu_ids)), dtype=np.int32)
        for j, mid in enumerate(self.menu_ids):
            idx = [pos[a] for a in sorted(self.menus[mid])]
            sub = ranks[:, idx]
            best = sub.min(axis=1, keepdims=True)
            bits = np.array([1 << i for i in idx], dtype=np.int32)
            self.maxsets[:, j] = ((sub == best) * bits).sum(axis=1)

    def mask(self, chosen: frozenset) -> int:
        return sum(self.bit[a] for a in chosen)

    def order(self, k: int) -> tuple[tuple[str, ...], ...]:
        return self.orders[k]

    def mistakes(self, C: Correspondence, policy: HmPolicy) -> tuple[np.ndarray, list[str]]:
        """Mistake counts for every order and the list of evaluated menus."""
        cols, targets, evaluated = [], [], []
        for j, mid in enumerate(self.menu_ids):
            if mid not in C.chosen:
                continue
            got = C[mid]
            if not got and policy is HmPolicy.ACTIVE_ONLY:
                continue
            cols.append(j)
            targets.append(self.mask(got))
            evaluated.append(mid)
        if not cols:
            return np.zeros(len(self.orders), dtype=np.int64), evaluated
        diff = self.maxsets[:, cols] != np.asarray(targets, dtype=np.int32)
        return diff.sum(axis=1), evaluated


@lru_cache(maxsize=16)
def _engine_cached(alternatives: tuple, menus: tuple, mode: HmMode) -> HmEngine:
    return HmEngine(alternatives, dict(menus), mode)


def engine_for(alternatives: Sequence[str], menus: Mapping[str, frozenset], mode: HmMode) -> HmEngine:
    return _engine_cached(tuple(sorted(alternatives)), tuple(menus.items()), HmMode(mode))


@dataclass(frozen=True)
class HmResult:
    score: int
    mode: HmMode
    policy: HmPolicy
    evaluated_menus: tuple[str, ...]
    witness_indices: tuple[int, ...]
    # per evaluated menu, whether the canonical witness marks it a mistake
    mistakes: Mapping[str, bool]
    engine: HmEngine

    @property
    def n_witnesses(self) -> int:
        return len(self.witness_indices)

    @property
    def witnesses(self) -> list[tuple[tuple[str, ...], ...]]:
        return [self.engine.order(k) for k in self.witness_indices]

    @property
    def canonical_witness(self) -> tuple[tuple[str, ...], ...]:
        return self.engine.order(self.witness_indices[0])

    def mistake_menus(self) -> list[str]:
        return [m for m in self.evaluated_menus if self.mistakes[m]]

    def to_json(self) -> dict:
        return {
            "score": self.score,
            "mode": self.mode.value,
            "policy": self.policy.value,
            "evaluated_menus": len(self.evaluated_menus),
            "n_witnesses": self.n_witnesses,
            "canonical_witness": [list(c) for c in self.canonical_witness],
            "mistake_menus": self.mistake_menus(),
        }


def hm_score(
    C: Correspondence,
    mode: HmMode = HmMode.STRICT,
    policy: HmPolicy = HmPolicy.PENALIZE,
    alternatives: Sequence[str] | None = None,
    engine: HmEngine | None = None,
) -> HmResult:
    """Minimum number of inconsistent menus over all orders of ``mode``.

    ``alternatives`` defaults to the union of the menus.
    """
    mode, policy = HmMode(mode), HmPolicy(policy)
    if engine is None:
        alts = alternatives or sorted(set().union(*C.menus.values()))
        engine = engine_for(alts, C.menus, mode)
    counts, evaluated = engine.mistakes(C, policy)
    score = int(counts.min())
    winners = np.flatnonzero(counts == score)
    first = int(winners[0])
    col = {m: j for j, m in enumerate(engine.menu_ids)}
    flags = {m: bool(engine.maxsets[first, col[m]] != engine.mask(C[m])) for m in evaluated}
    return HmResult(
        score, mode, policy, tuple(evaluated), tuple(int(k) for k in winners), flags, engine
    )
