import random
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import linprog

from riskchoice.axioms import RiskAttitude
from riskchoice.eu import EPSILON, classify_eum, eu_rationalizable
from riskchoice.hm import HmMode, HmPolicy
from riskchoice.lp import find_feasible_point
from riskchoice.simulate import UtilityFunction

from conftest import corr


def eu_choices(design, u: UtilityFunction):
    eus = {l: u.expected(p) for l, p in design.lotteries.items()}
    out = {}
    for m, items in design.menus.items():
        best = max(eus[x] for x in items)
        out[m] = {x for x in items if eus[x] == best}
    return out


SQRT = UtilityFunction.power((0, 9, 10, 20, 24), "1/2")


def test_concave_agent_is_eum(design):
    C = corr(design, eu_choices(design, SQRT))
    fit = eu_rationalizable(C, design.lotteries)
    assert fit.feasible
    eus = {l: sum(m * fit.utilities[z] for z, m in p.support) for l, p in design.lotteries.items()}
    for m, items in design.menus.items():
        (c,) = C[m]
        assert all(eus[c] - eus[x] >= EPSILON for x in items if x != c)
    res = classify_eum(C, design, design.fixtures())
    assert res.is_eum_all and res.risk_attitude is RiskAttitude.AVERSE


def test_dominated_choice_infeasible(design):
    C = corr(design, {"M1": {"A2"}})
    fit = eu_rationalizable(C, design.lotteries, HmPolicy.ACTIVE_ONLY)
    assert not fit.feasible and fit.conflict == ("M1",)


def test_independence_break_is_infeasible(design):
    C = corr(design, {"M2": {"B1"}, "M3": {"C2"}})
    fit = eu_rationalizable(C, design.lotteries, HmPolicy.ACTIVE_ONLY)
    assert not fit.feasible and fit.conflict == ("M2", "M3")


def test_um_but_not_eum(design):
    choices = eu_choices(design, SQRT)
    choices["M2"], choices["M3"] = {"B1"}, {"C2"}
    C = corr(design, choices)
    res = classify_eum(C, design, design.fixtures(), HmMode.WEAK)
    assert res.is_um and not res.independence_ok and not res.is_eum_all


def test_all_deferral(design):
    C = corr(design, {})
    res = classify_eum(C, design, design.fixtures(), HmMode.WEAK, HmPolicy.PENALIZE)
    assert not res.is_um and res.hm.score == 15
    assert not eu_rationalizable(C, design.lotteries).feasible
    assert eu_rationalizable(C, design.lotteries, HmPolicy.ACTIVE_ONLY).feasible


def test_indifference_needs_equal_eu(design):
    # linear utility ties A1, B1, B2, D at EV 12
    lin = UtilityFunction.linear(design.prizes)
    C = corr(design, eu_choices(design, lin))
    fit = eu_rationalizable(C, design.lotteries)
    assert fit.feasible
    eus = {l: sum(m * fit.utilities[z] for z, m in p.support) for l, p in design.lotteries.items()}
    for m, items in design.menus.items():
        chosen = C[m]
        assert len({eus[x] for x in chosen}) == 1
        top = eus[next(iter(chosen))]
        assert all(top - eus[x] >= EPSILON for x in items - chosen)


def test_lp_simple_cases():
    # x >= 1, x <= 2 (as -x >= -2)
    (x,) = find_feasible_point([[F(1)], [F(-1)]], [F(1), F(-2)])
    assert 1 <= x <= 2
    assert find_feasible_point([[F(1)], [F(-1)]], [F(3), F(-2)]) is None
    # x + y = 1, x - y >= 1/2
    x = find_feasible_point([[F(1), F(-1)]], [F(1, 2)], [[F(1), F(1)]], [F(1)])
    assert x[0] + x[1] == 1 and x[0] - x[1] >= F(1, 2)


def test_lp_agrees_with_scipy():
    rng = random.Random(17)
    for _ in range(150):
        n, m = rng.randint(1, 4), rng.randint(1, 6)
        G = [[F(rng.randint(-3, 3)) for _ in range(n)] for _ in range(m)]
        g = [F(rng.randint(-4, 4)) for _ in range(m)]
        ours = find_feasible_point(G, g, n_vars=n)
        ref = linprog(np.zeros(n), A_ub=-np.array(G, dtype=float), b_ub=-np.array(g, dtype=float),
                      bounds=[(0, None)] * n, method="highs")
        assert (ours is not None) == (ref.status == 0)
        if ours is not None:
            assert all(x >= 0 for x in ours)
            assert all(sum(a * x for a, x in zip(row, ours)) >= b for row, b in zip(G, g))


@pytest.mark.parametrize("shape", ["concave", "convex"])
def test_random_agents_eum_consistent_with_oracle(design, shape):
    rng = np.random.default_rng(4)
    for _ in range(30):
        u = UtilityFunction.random_shaped(design.prizes, rng, shape)
        C = corr(design, eu_choices(design, u))
        res = classify_eum(C, design, design.fixtures(), HmMode.WEAK)
        assert res.is_eum_all and eu_rationalizable(C, design.lotteries).feasible
