import itertools
import random

from hypothesis import given, strategies as st

from riskchoice.choices import Correspondence
from riskchoice.hm import HmEngine, HmMode, HmPolicy, hm_score

from conftest import corr, menus_corr
from hm_oracle import min_deletions

WORKED = {
    "M1": ("A1", "A2"),
    "M11": ("A1", "A2", "C2"),
    "M15": ("A1", "A2", "C1", "C2"),
}


def test_worked_weak_example():
    C = menus_corr(WORKED, {"M1": {"A1", "A2"}, "M11": {"A1", "A2"}, "M15": {"A1"}})
    res = hm_score(C, HmMode.WEAK)
    assert res.score == 1
    assert res.mistake_menus() == ["M15"]
    # every minimiser makes A1 ~ A2, both above C2
    for wo in res.witnesses:
        level = {x: i for i, cls in enumerate(wo) for x in cls}
        assert level["A1"] == level["A2"] < level["C2"]


def test_strict_zero_for_linear_order(design):
    order = ["D", "A1", "B1", "B2", "A2", "C1", "C2"]
    C = corr(design, {m: {min(v, key=order.index)} for m, v in design.menus.items()})
    res = hm_score(C, HmMode.STRICT)
    assert res.score == 0
    assert tuple((x,) for x in order) in res.witnesses
    assert res.canonical_witness == min(res.witnesses)


def test_strict_cycle_scores_one():
    menus = {"xy": "xy", "yz": "yz", "xz": "xz"}
    C = menus_corr(menus, {"xy": {"x"}, "yz": {"y"}, "xz": {"z"}})
    res = hm_score(C, HmMode.STRICT)
    assert res.score == 1 and res.n_witnesses == 3


def test_deferral_policies(design):
    C = corr(design, {})
    assert hm_score(C, HmMode.STRICT, HmPolicy.PENALIZE).score == 15
    res = hm_score(C, HmMode.STRICT, HmPolicy.ACTIVE_ONLY)
    assert res.score == 0 and res.evaluated_menus == ()


def test_weak_orders_accept_indifference(design):
    C = corr(design, {m: set(v) for m, v in design.menus.items()})
    assert hm_score(C, HmMode.WEAK).score == 0
    assert hm_score(C, HmMode.STRICT).score == 15


def test_proper_subset_is_mistake_in_weak_mode():
    C = menus_corr({"xyz": "xyz"}, {"xyz": {"x", "y"}})
    assert hm_score(C, HmMode.WEAK).score == 0
    # the only way to keep {x,y} is x~y above z; choosing just {x} is fine too
    C = menus_corr({"xy": "xy", "xyz": "xyz"}, {"xy": {"x", "y"}, "xyz": {"x"}})
    assert hm_score(C, HmMode.WEAK).score == 1


def test_witness_order_is_lexicographic_first():
    C = menus_corr({"xy": "xy"}, {"xy": {"x"}})
    res = hm_score(C, HmMode.STRICT)
    assert res.canonical_witness == min(res.witnesses)


# --- oracle equivalence --------------------------------------------------------

def _combos(alts, k):
    return itertools.combinations(alts, k)


def random_instance(rng):
    n = rng.randint(2, 5)
    alts = [chr(ord("a") + i) for i in range(n)]
    subsets = [frozenset(s) for k in range(2, n + 1) for s in _combos(alts, k)]
    menus = rng.sample(subsets, min(len(subsets), rng.randint(1, 6)))
    menus = {f"m{i}": m for i, m in enumerate(menus)}
    chosen = {mid: frozenset((rng.choice(sorted(m)),)) for mid, m in menus.items()}
    return alts, menus, chosen


def test_strict_matches_bruteforce_oracle():
    rng = random.Random(2024)
    for _ in range(200):
        alts, menus, chosen = random_instance(rng)
        C = Correspondence("T", menus, chosen)
        got = hm_score(C, HmMode.STRICT, alternatives=alts).score
        want = min_deletions([(menus[m], next(iter(chosen[m]))) for m in menus])
        assert got == want, (menus, chosen)


def test_weak_not_above_strict_on_single_valued():
    rng = random.Random(7)
    for _ in range(100):
        alts, menus, chosen = random_instance(rng)
        C = Correspondence("T", menus, chosen)
        assert (hm_score(C, HmMode.WEAK, alternatives=alts).score
                <= hm_score(C, HmMode.STRICT, alternatives=alts).score)


def test_adding_a_menu_never_lowers_score():
    rng = random.Random(9)
    for _ in range(100):
        alts, menus, chosen = random_instance(rng)
        if len(menus) < 2:
            continue
        C = Correspondence("T", menus, chosen)
        drop = rng.choice(sorted(menus))
        smaller = C.restrict([m for m in menus if m != drop])
        for mode in HmMode:
            assert (hm_score(smaller, mode, alternatives=alts).score
                    <= hm_score(C, mode, alternatives=alts).score)


@given(st.data())
def test_score_bounds_and_witness_consistency(design, data):
    choices = {}
    for m in design.menu_order:
        items = sorted(design.menus[m])
        choices[m] = set(data.draw(st.lists(st.sampled_from(items), max_size=2, unique=True)))
    C = corr(design, choices)
    for mode in HmMode:
        for policy in HmPolicy:
            res = hm_score(C, mode, policy)
            assert 0 <= res.score <= len(res.evaluated_menus)
            assert len(res.mistake_menus()) == res.score


def test_engine_sizes(design):
    assert len(HmEngine(design.lottery_ids, design.menus, HmMode.STRICT).orders) == 5040
    assert len(HmEngine(design.lottery_ids, design.menus, HmMode.WEAK).orders) == 47293
