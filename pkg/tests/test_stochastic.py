from fractions import Fraction as F

from hypothesis import given, strategies as st

from riskchoice.axioms import check_contraction, check_decisiveness, check_transitivity
from riskchoice.choices import ChoiceProbabilities, ChoiceRecord, estimate_probabilities, slice_rounds
from riskchoice.design import make_triple
from riskchoice.stochastic import (
    Transitivity,
    check_regularity,
    check_stochastic_decisiveness,
    check_stochastic_transitivity,
)

from conftest import corr

XYZ = {"xy": frozenset("xy"), "yz": frozenset("yz"), "xz": frozenset("xz")}
TRIPLE = make_triple(XYZ, ("x", "y", "z"))


def probs(menus, table, rounds=5):
    """``table[(lottery, menu)]`` frequencies; active mass is their sum."""
    prob = {(l, m): F(0) for m, items in menus.items() for l in items}
    prob.update({k: F(v) for k, v in table.items()})
    active = {m: sum(prob[(l, m)] for l in items) for m, items in menus.items()}
    return ChoiceProbabilities("T", menus, rounds, prob, active)


def binary(pq, qr, pr):
    return probs(XYZ, {("x", "xy"): pq, ("y", "xy"): 1 - F(pq),
                       ("y", "yz"): qr, ("z", "yz"): 1 - F(qr),
                       ("x", "xz"): pr, ("z", "xz"): 1 - F(pr)})


def test_wst_violation():
    P = binary("3/5", "3/5", "2/5")
    assert check_stochastic_transitivity(P, [TRIPLE], Transitivity.WEAK)


def test_mst_ok_sst_violation():
    P = binary("4/5", "3/5", "3/5")
    assert check_stochastic_transitivity(P, [TRIPLE], Transitivity.MODERATE) == []
    v = check_stochastic_transitivity(P, [TRIPLE], Transitivity.STRONG)
    assert v and v[0].witness["bound"] == "4/5"


def test_half_ties_satisfy_antecedent():
    P = binary("1/2", "1/2", "1/2")
    for variant in Transitivity:
        assert check_stochastic_transitivity(P, [TRIPLE], variant) == []
    P = binary("1/2", "1/2", "2/5")
    assert check_stochastic_transitivity(P, [TRIPLE], Transitivity.WEAK)


def test_raw_vs_renormalized():
    # heavy deferral at xy and xz: raw frequencies never reach 1/2, active-only ones do
    P = probs(XYZ, {("x", "xy"): "2/5", ("y", "xy"): "1/5",
                    ("y", "yz"): 1, ("x", "xz"): "1/5", ("z", "xz"): "2/5"})
    assert check_stochastic_transitivity(P, [TRIPLE], Transitivity.WEAK) == []
    assert check_stochastic_transitivity(P, [TRIPLE], Transitivity.WEAK, renormalize=True)


def test_regularity():
    menus = {"M1": frozenset(("A1", "A2")), "M10": frozenset(("A1", "A2", "C1"))}
    P = probs(menus, {("A1", "M1"): "2/5", ("A2", "M1"): "3/5", ("A1", "M10"): "3/5",
                      ("A2", "M10"): "2/5"})
    v = check_regularity(P, [("M1", "M10")])
    assert [x.witness["lottery"] for x in v] == ["A1"]
    flat = probs(menus, {("A1", "M1"): "1/2", ("A2", "M1"): "1/2",
                         ("A1", "M10"): "1/2", ("A2", "M10"): "1/2"})
    assert check_regularity(flat, [("M1", "M10")]) == []


def test_stochastic_decisiveness(design):
    recs, t = [], 1
    for r in range(5):
        for mid in design.menu_order:
            c = sorted(design.menus[mid])[0]
            if mid == "M1" and r == 0:
                c = None
            if mid == "M2":
                c = None
            recs.append(ChoiceRecord("S", t, mid, c))
            t += 1
    P = estimate_probabilities(slice_rounds(design, recs))
    v = check_stochastic_decisiveness(P)
    assert {x.witness["menu"]: x.witness["p_active"] for x in v} == {"M1": "4/5", "M2": "0"}


def test_deterministic_strict_order_passes_everything(design):
    rank = {l: i for i, l in enumerate(["A1", "D", "B1", "A2", "B2", "C1", "C2"])}
    recs, t = [], 1
    for _ in range(5):
        for mid in design.menu_order:
            recs.append(ChoiceRecord("S", t, mid, min(design.menus[mid], key=rank.get)))
            t += 1
    P = estimate_probabilities(slice_rounds(design, recs))
    assert check_regularity(P, design.nested_pairs()) == []
    for variant in Transitivity:
        assert check_stochastic_transitivity(P, design.triples, variant) == []
    assert check_stochastic_decisiveness(P) == []


freq = st.integers(0, 5).map(lambda k: F(k, 5))


@given(st.lists(freq, min_size=6, max_size=6), st.booleans())
def test_transitivity_nesting(fs, renorm):
    a, b, c, d, e, f = fs
    # split each binary menu's mass between its two lotteries, rest deferred
    table = {("x", "xy"): a, ("y", "xy"): min(b, 1 - a),
             ("y", "yz"): c, ("z", "yz"): min(d, 1 - c),
             ("x", "xz"): e, ("z", "xz"): min(f, 1 - e)}
    P = probs(XYZ, table)
    w, m, s = (len(check_stochastic_transitivity(P, [TRIPLE], v, renorm)) for v in Transitivity)
    assert s >= m >= w
    if s == 0:
        assert m == 0 and w == 0


@given(st.data())
def test_constant_choices_match_deterministic_axioms(design, data):
    pick = {}
    for mid in design.menu_order:
        pick[mid] = data.draw(st.sampled_from(sorted(design.menus[mid]) + [None]))
    recs, t = [], 1
    for _ in range(5):
        for mid in design.menu_order:
            recs.append(ChoiceRecord("S", t, mid, pick[mid]))
            t += 1
    P = estimate_probabilities(slice_rounds(design, recs))
    stochastic_ok = not (
        check_regularity(P, design.nested_pairs())
        or check_stochastic_decisiveness(P)
        or any(check_stochastic_transitivity(P, design.triples, v) for v in Transitivity)
    )
    C = corr(design, {m: {c} if c else set() for m, c in pick.items()})
    deterministic_ok = not (
        check_decisiveness(C) or check_transitivity(C, design.triples)
        or check_contraction(C, design.nested_pairs())
    )
    assert stochastic_ok == deterministic_ok
