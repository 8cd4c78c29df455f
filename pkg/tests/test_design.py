from fractions import Fraction as F

import pytest

from riskchoice.design import (
    DesignError,
    Taxonomy,
    computed_label,
    load_design_dir,
    mixture_map,
    taxonomy_disagreements,
    write_design_dir,
)


def test_builtin_shape(design):
    sizes = sorted(len(m) for m in design.menus.values())
    assert len(design.lotteries) == 7 and len(design.menus) == 15
    assert sizes.count(2) == 9 and sizes.count(3) == 4 and sizes.count(4) == 2
    assert len(design.triples) == 5
    assert design.prizes == (0, 9, 10, 20, 24)
    assert design.rounds_expected == 5


def test_nested_pairs_are_strict_subsets(design):
    pairs = design.nested_pairs()
    assert len(pairs) == 20
    for b, a in pairs:
        assert design.menus[b] < design.menus[a]


def test_mixture_map(design):
    assert mixture_map(design, design.independence_pairs[0]) == {"B1": "C1", "B2": "C2"}


def test_declared_and_computed_fixtures(design):
    declared = design.fixtures(Taxonomy.DECLARED)
    assert [p.menu for p in declared.star_pairs] == ["M4", "M6", "M8"]
    assert [p.menu for p in declared.fosd_menus] == ["M1", "M9"]
    computed = design.fixtures("computed")
    assert [p.menu for p in computed.fosd_menus] == ["M1", "M9"]
    # exact recomputation adds the B2 and C2 pairs
    assert [(p.menu, p.dominant) for p in computed.star_pairs] == [
        ("M2", "B1"), ("M3", "C1"), ("M4", "D"), ("M5", "D"), ("M6", "A1"), ("M7", "A1"), ("M8", "A1"),
    ]


def test_computed_label_menu_10(design):
    lab = computed_label(design, "M10")
    assert (lab.relation, lab.dominant) == ("FOSD", "A1")


def test_taxonomy_disagreements(design):
    flagged = {d["menu"]: d for d in taxonomy_disagreements(design)}
    for mid, dom in (("M2", "B1"), ("M3", "C1"), ("M5", "D"), ("M7", "A1")):
        assert flagged[mid]["declared"] == "NONE"
        assert (flagged[mid]["computed"], flagged[mid]["computed_dominant"]) == ("SOSD", dom)
    assert "M1" not in flagged and "M4" not in flagged


def test_roundtrip(tmp_path, design):
    write_design_dir(design, tmp_path / "d")
    back = load_design_dir(tmp_path / "d")
    assert dict(back.menus) == dict(design.menus)
    assert back.menu_order == design.menu_order
    assert back.star_pairs == design.star_pairs and back.fosd_menus == design.fosd_menus
    assert [t.lotteries for t in back.triples] == [t.lotteries for t in design.triples]
    assert back.independence_pairs[0].alpha == F(1, 2)
    assert dict(back.declared) == dict(design.declared)


def test_unknown_lottery(tmp_path, design):
    write_design_dir(design, tmp_path / "d")
    menus = tmp_path / "d" / "menus.csv"
    menus.write_text(menus.read_text() + "M16,Z9\nM16,A1\n")
    with pytest.raises(DesignError, match="Z9"):
        load_design_dir(tmp_path / "d")


def test_duplicate_menu(tmp_path, design):
    write_design_dir(design, tmp_path / "d")
    menus = tmp_path / "d" / "menus.csv"
    menus.write_text(menus.read_text() + "M16,A1\nM16,A2\n")
    with pytest.raises(DesignError, match="duplicates"):
        load_design_dir(tmp_path / "d")


def test_fixture_on_non_binary_menu(tmp_path, design):
    write_design_dir(design, tmp_path / "d")
    fx = tmp_path / "d" / "fixtures.toml"
    fx.write_text(fx.read_text() + '\n[[fosd]]\nmenu = "M10"\ndominant = "A1"\ndominated = "A2"\n')
    with pytest.raises(DesignError, match="non-binary"):
        load_design_dir(tmp_path / "d")


def test_bad_mixture(tmp_path, design):
    write_design_dir(design, tmp_path / "d")
    fx = tmp_path / "d" / "fixtures.toml"
    fx.write_text(fx.read_text().replace('alpha = "1/2"', 'alpha = "1/3"'))
    with pytest.raises(DesignError, match="no mixed lottery"):
        load_design_dir(tmp_path / "d")
