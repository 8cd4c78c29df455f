"""Experiment design: lotteries, menus, declared dominance labels and the
fixtures each axiom test runs over."""

from __future__ import annotations

import csv
import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

try:
    import tomllib as tomli
except ImportError:  # Python 3.10
    import tomli

from .lottery import (
    DominanceKind,
    Lottery,
    as_fraction,
    check_fosd,
    check_sosd,
    load_lotteries_csv,
    mix,
    overlapping_range,
    same_distribution,
    write_lotteries_csv,
)


class DesignError(ValueError):
    """Raised for inconsistent design inputs."""


class Taxonomy(str, enum.Enum):
    DECLARED = "declared"
    COMPUTED = "computed"


# Labels a menu may carry. NEAR_* mark a lottery that dominates "for most of
# the range" without a proper dominance relation.
LABELS = ("FOSD", "SOSD", "NONE", "NEAR_FOSD", "NEAR_SOSD")


@dataclass(frozen=True)
class MenuLabel:
    relation: str
    dominant: str | None = None
    # empty means "every other lottery in the menu"
    dominated: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.relation not in LABELS:
            raise DesignError(f"unknown dominance label {self.relation!r}")
        if self.relation != "NONE" and self.dominant is None:
            raise DesignError(f"label {self.relation} needs a dominant lottery")


@dataclass(frozen=True)
class Triple:
    lotteries: tuple[str, str, str]
    # pair (frozenset of two lottery ids) -> binary menu id
    menus: Mapping[frozenset, str]


@dataclass(frozen=True)
class IndependencePair:
    base: str
    mixed: str
    mixing: Lottery
    alpha: Fraction


@dataclass(frozen=True)
class DominancePair:
    """A binary menu whose lotteries are ranked by some dominance relation."""

    menu: str
    dominant: str
    dominated: str


@dataclass(frozen=True)
class Fixtures:
    """Everything the axiom detectors iterate over, for one taxonomy mode."""

    taxonomy: Taxonomy
    fosd_menus: tuple[DominancePair, ...]
    star_pairs: tuple[DominancePair, ...]
    triples: tuple[Triple, ...]
    independence_pairs: tuple[IndependencePair, ...]
    nested_pairs: tuple[tuple[str, str], ...]  # (smaller B, larger A), B strictly inside A


@dataclass(frozen=True)
class ExperimentDesign:
    name: str
    lotteries: Mapping[str, Lottery]
    menus: Mapping[str, frozenset]
    declared: Mapping[str, MenuLabel]
    triples: tuple[Triple, ...]
    independence_pairs: tuple[IndependencePair, ...]
    star_pairs: tuple[DominancePair, ...]
    fosd_menus: tuple[DominancePair, ...]
    rounds_expected: int = 5
    menu_order: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.menu_order:
            object.__setattr__(self, "menu_order", tuple(self.menus))
        validate_design(self)

    @property
    def lottery_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.lotteries))

    @property
    def prizes(self) -> tuple[Fraction, ...]:
        return tuple(sorted({z for lot in self.lotteries.values() for z in lot.prizes}))

    def binary_menu(self, a: str, b: str) -> str | None:
        target = frozenset((a, b))
        for mid, items in self.menus.items():
            if items == target:
                return mid
        return None

    def nested_pairs(self) -> tuple[tuple[str, str], ...]:
        out = []
        for b, a in itertools.permutations(self.menu_order, 2):
            if self.menus[b] < self.menus[a]:
                out.append((b, a))
        return tuple(out)

    def fixtures(self, taxonomy: Taxonomy | str = Taxonomy.DECLARED) -> Fixtures:
        taxonomy = Taxonomy(taxonomy)
        if taxonomy is Taxonomy.DECLARED:
            fosd, star = self.fosd_menus, self.star_pairs
        else:
            fosd, star = computed_pairs(self)
        return Fixtures(
            taxonomy, tuple(fosd), tuple(star), self.triples,
            self.independence_pairs, self.nested_pairs(),
        )


def computed_pairs(design: ExperimentDesign) -> tuple[list[DominancePair], list[DominancePair]]:
    """FOSD menus and StAR pairs recomputed with exact dominance checks.

    StAR pairs are binary menus ranked by SOSD but not FOSD whose lotteries
    have overlapping ranges.
    """
    fosd: list[DominancePair] = []
    star: list[DominancePair] = []
    for mid in design.menu_order:
        items = sorted(design.menus[mid])
        if len(items) != 2:
            continue
        p, q = (design.lotteries[i] for i in items)
        rel = check_fosd(p, q)
        if rel:
            fosd.append(DominancePair(mid, rel.dominant, rel.dominated))
            continue
        rel = check_sosd(p, q)
        if rel and overlapping_range(p, q):
            star.append(DominancePair(mid, rel.dominant, rel.dominated))
    return fosd, star


def computed_label(design: ExperimentDesign, menu_id: str) -> MenuLabel:
    """Exact label for a menu: the strongest relation under which one lottery
    dominates every other lottery in it."""
    items = sorted(design.menus[menu_id])
    for check, name in ((check_fosd, "FOSD"), (check_sosd, "SOSD")):
        for cand in items:
            others = [o for o in items if o != cand]
            if all(
                check(design.lotteries[cand], design.lotteries[o]).dominant == cand for o in others
            ):
                return MenuLabel(name, cand, tuple(others))
    return MenuLabel("NONE")


def mixture_map(design: ExperimentDesign, pair: IndependencePair) -> dict[str, str]:
    """Map each base-menu lottery to the mixed-menu lottery equal to
    ``alpha * base + (1 - alpha) * mixing``."""
    out = {}
    mixed_items = design.menus[pair.mixed]
    for lid in sorted(design.menus[pair.base]):
        target = mix(pair.alpha, design.lotteries[lid], pair.mixing)
        match = [m for m in mixed_items if same_distribution(design.lotteries[m], target)]
        if len(match) != 1:
            raise DesignError(
                f"independence pair {pair.base}/{pair.mixed}: no mixed lottery equals "
                f"{pair.alpha}*{lid} + (1-{pair.alpha})*{pair.mixing.id}"
            )
        out[lid] = match[0]
    if sorted(out.values()) != sorted(mixed_items):
        raise DesignError(f"independence pair {pair.base}/{pair.mixed}: mixture map not onto")
    return out


def validate_design(d: ExperimentDesign) -> None:
    seen: dict[frozenset, str] = {}
    for mid, items in d.menus.items():
        unknown = sorted(set(items) - set(d.lotteries))
        if unknown:
            raise DesignError(f"menu {mid} references unknown lotteries {unknown}")
        if len(items) < 2:
            raise DesignError(f"menu {mid} has fewer than two lotteries")
        if items in seen:
            raise DesignError(f"menu {mid} duplicates menu {seen[items]}")
        seen[items] = mid
    if sorted(d.menu_order) != sorted(d.menus):
        raise DesignError("menu_order must list every menu exactly once")
    for mid, label in d.declared.items():
        if mid not in d.menus:
            raise DesignError(f"declared label for unknown menu {mid}")
        members = [label.dominant, *label.dominated] if label.dominant else []
        if any(x not in d.menus[mid] for x in members):
            raise DesignError(f"declared label for {mid} names lotteries outside the menu")

    def binary(mid: str, what: str) -> frozenset:
        if mid not in d.menus:
            raise DesignError(f"{what} references unknown menu {mid}")
        if len(d.menus[mid]) != 2:
            raise DesignError(f"{what} references non-binary menu {mid}")
        return d.menus[mid]

    for t in d.triples:
        for pair, mid in t.menus.items():
            if binary(mid, f"triple {t.lotteries}") != pair:
                raise DesignError(f"triple {t.lotteries}: menu {mid} is not {sorted(pair)}")
        if len(t.menus) != 3:
            raise DesignError(f"triple {t.lotteries} needs three binary menus")
    for pair in d.independence_pairs:
        binary(pair.base, "independence pair")
        binary(pair.mixed, "independence pair")
        mixture_map(d, pair)
    for sp in (*d.star_pairs, *d.fosd_menus):
        items = binary(sp.menu, "dominance fixture")
        if items != frozenset((sp.dominant, sp.dominated)):
            raise DesignError(f"fixture for {sp.menu} names lotteries outside the menu")
    for sp in d.star_pairs:
        p, q = d.lotteries[sp.dominant], d.lotteries[sp.dominated]
        if not overlapping_range(p, q):
            raise DesignError(f"StAR menu {sp.menu}: lotteries lack an overlapping range")
    if d.rounds_expected < 1:
        raise DesignError("rounds_expected must be positive")


def make_triple(design_menus: Mapping[str, frozenset], lotteries: tuple[str, str, str]) -> Triple:
    menus = {}
    for a, b in itertools.combinations(lotteries, 2):
        pair = frozenset((a, b))
        mid = next((m for m, items in design_menus.items() if items == pair), None)
        if mid is None:
            raise DesignError(f"triple {lotteries}: no binary menu for {a},{b}")
        menus[pair] = mid
    return Triple(lotteries, menus)


def _lot(id: str, masses: dict[int, str]) -> Lottery:
    return Lottery.from_masses(id, {z: Fraction(m) for z, m in masses.items()})


BUILTIN_LOTTERIES = {
    lot.id: lot
    for lot in (
        _lot("A1", {0: "10/100", 10: "60/100", 20: "30/100"}),
        _lot("A2", {0: "20/100", 10: "50/100", 20: "30/100"}),
        _lot("B1", {0: "25/100", 10: "30/100", 20: "45/100"}),
        _lot("B2", {0: "25/100", 9: "40/100", 24: "35/100"}),
        _lot("C1", {0: "625/1000", 10: "150/1000", 20: "225/1000"}),
        _lot("C2", {0: "625/1000", 9: "200/1000", 24: "175/1000"}),
        _lot("D", {0: "15/100", 10: "50/100", 20: "35/100"}),
    )
}

BUILTIN_MENUS = {
    "M1": ("A1", "A2"),
    "M2": ("B1", "B2"),
    "M3": ("C1", "C2"),
    "M4": ("B1", "D"),
    "M5": ("B2", "D"),
    "M6": ("A1", "B1"),
    "M7": ("A1", "B2"),
    "M8": ("A1", "D"),
    "M9": ("A2", "D"),
    "M10": ("A1", "A2", "C1"),
    "M11": ("A1", "A2", "C2"),
    "M12": ("A1", "B1", "B2"),
    "M13": ("B1", "B2", "D"),
    "M14": ("A1", "B1", "B2", "D"),
    "M15": ("A1", "A2", "C1", "C2"),
}

BUILTIN_LABELS = {
    "M1": MenuLabel("FOSD", "A1", ("A2",)),
    "M2": MenuLabel("NONE"),
    "M3": MenuLabel("NONE"),
    "M4": MenuLabel("SOSD", "D", ("B1",)),
    "M5": MenuLabel("NONE"),
    "M6": MenuLabel("SOSD", "A1", ("B1",)),
    "M7": MenuLabel("NONE"),
    "M8": MenuLabel("SOSD", "A1", ("D",)),
    "M9": MenuLabel("FOSD", "D", ("A2",)),
    "M10": MenuLabel("FOSD", "A1", ("A2", "C1")),
    "M11": MenuLabel("NEAR_FOSD", "A1", ("A2", "C2")),
    "M12": MenuLabel("NEAR_SOSD", "A1", ("B1", "B2")),
    "M13": MenuLabel("NEAR_SOSD", "D", ("B1", "B2")),
    "M14": MenuLabel("NEAR_SOSD", "A1", ("B1", "B2", "D")),
    "M15": MenuLabel("NEAR_FOSD", "A1", ("A2", "C1", "C2")),
}

BUILTIN_TRIPLES = (
    ("A1", "D", "A2"),
    ("A1", "D", "B2"),
    ("A1", "B1", "B2"),
    ("D", "B2", "B1"),
    ("A1", "D", "B1"),
)

ZERO_PRIZE = Lottery.from_masses("R", {0: 1})


def builtin_design() -> ExperimentDesign:
    """The 7-lottery, 15-menu design with its declared taxonomy."""
    menus = {m: frozenset(items) for m, items in BUILTIN_MENUS.items()}
    return ExperimentDesign(
        name="builtin",
        lotteries=dict(BUILTIN_LOTTERIES),
        menus=menus,
        declared=dict(BUILTIN_LABELS),
        triples=tuple(make_triple(menus, t) for t in BUILTIN_TRIPLES),
        independence_pairs=(IndependencePair("M2", "M3", ZERO_PRIZE, Fraction(1, 2)),),
        star_pairs=(
            DominancePair("M4", "D", "B1"),
            DominancePair("M6", "A1", "B1"),
            DominancePair("M8", "A1", "D"),
        ),
        fosd_menus=(DominancePair("M1", "A1", "A2"), DominancePair("M9", "D", "A2")),
        rounds_expected=5,
        menu_order=tuple(BUILTIN_MENUS),
    )


# ---------------------------------------------------------------- file I/O


def load_menus_csv(path: str | Path) -> dict[str, frozenset]:
    """Read ``menu_id, lottery_id`` membership rows, keeping first-seen menu order."""
    members: dict[str, list[str]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not {"menu_id", "lottery_id"} <= set(reader.fieldnames or ()):
            raise DesignError(f"{path}: header must contain menu_id, lottery_id")
        for line, row in enumerate(reader, start=2):
            mid, lid = row["menu_id"].strip(), row["lottery_id"].strip()
            if lid in members.setdefault(mid, []):
                raise DesignError(f"{path}:{line}: {lid} listed twice in menu {mid}")
            members[mid].append(lid)
    return {m: frozenset(v) for m, v in members.items()}


def _dominance_pairs(entries: list, what: str) -> tuple[DominancePair, ...]:
    try:
        return tuple(DominancePair(e["menu"], e["dominant"], e["dominated"]) for e in entries)
    except KeyError as exc:
        raise DesignError(f"{what} entry missing key {exc}") from None


def load_design(
    lotteries_path: str | Path,
    menus_path: str | Path,
    fixtures_path: str | Path,
    name: str | None = None,
) -> ExperimentDesign:
    """Load a design from ``lotteries.csv``, ``menus.csv`` and ``fixtures.toml``.

    The fixtures file lists ``rounds_expected``, per-menu ``labels``,
    ``triples`` (three lottery ids each; binary menus are looked up),
    ``independence`` pairs (base/mixed menu ids, ``alpha`` and the mixing
    lottery as ``[[prize, "num/den"], ...]``), ``star`` pairs and
    ``fosd`` menus (``menu``, ``dominant``, ``dominated``).
    """
    try:
        lotteries = load_lotteries_csv(lotteries_path)
    except ValueError as exc:
        raise DesignError(str(exc)) from None
    menus = load_menus_csv(menus_path)
    with open(fixtures_path, "rb") as fh:
        try:
            cfg = tomli.load(fh)
        except tomli.TOMLDecodeError as exc:
            raise DesignError(f"{fixtures_path}: {exc}") from None
    for mid, items in menus.items():
        unknown = sorted(set(items) - set(lotteries))
        if unknown:
            raise DesignError(f"{menus_path}: menu {mid} references unknown lotteries {unknown}")
    labels = {}
    for entry in cfg.get("labels", []):
        labels[entry["menu"]] = MenuLabel(
            entry["relation"], entry.get("dominant"), tuple(entry.get("dominated", ()))
        )
    triples = tuple(make_triple(menus, tuple(t["lotteries"])) for t in cfg.get("triples", []))
    indep = []
    for e in cfg.get("independence", []):
        mixing = Lottery.from_masses(
            e.get("mixing_id", "R"), {as_fraction(str(z)): as_fraction(str(m)) for z, m in e["mixing"]}
        )
        indep.append(IndependencePair(e["base"], e["mixed"], mixing, as_fraction(str(e["alpha"]))))
    return ExperimentDesign(
        name=name or Path(menus_path).parent.name or "custom",
        lotteries=lotteries,
        menus=menus,
        declared=labels,
        triples=triples,
        independence_pairs=tuple(indep),
        star_pairs=_dominance_pairs(cfg.get("star", []), "star"),
        fosd_menus=_dominance_pairs(cfg.get("fosd", []), "fosd"),
        rounds_expected=int(cfg.get("rounds_expected", 5)),
        menu_order=tuple(menus),
    )


def load_design_dir(path: str | Path) -> ExperimentDesign:
    p = Path(path)
    return load_design(p / "lotteries.csv", p / "menus.csv", p / "fixtures.toml", name=p.name)


def write_design_dir(design: ExperimentDesign, path: str | Path) -> None:
    """Write a design in the three-file format ``load_design_dir`` reads."""
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    write_lotteries_csv((design.lotteries[i] for i in design.lottery_ids), p / "lotteries.csv")
    with open(p / "menus.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["menu_id", "lottery_id"])
        for mid in design.menu_order:
            for lid in sorted(design.menus[mid]):
                w.writerow([mid, lid])
    lines = [f"rounds_expected = {design.rounds_expected}", ""]
    for mid in design.menu_order:
        lab = design.declared.get(mid)
        if lab is None:
            continue
        lines += ["[[labels]]", f'menu = "{mid}"', f'relation = "{lab.relation}"']
        if lab.dominant:
            lines.append(f'dominant = "{lab.dominant}"')
            lines.append("dominated = [" + ", ".join(f'"{x}"' for x in lab.dominated) + "]")
        lines.append("")
    for t in design.triples:
        lines += ["[[triples]]", "lotteries = [" + ", ".join(f'"{x}"' for x in t.lotteries) + "]", ""]
    for ip in design.independence_pairs:
        atoms = ", ".join(f'["{z}", "{m}"]' for z, m in ip.mixing.support)
        lines += [
            "[[independence]]", f'base = "{ip.base}"', f'mixed = "{ip.mixed}"',
            f'alpha = "{ip.alpha}"', f'mixing_id = "{ip.mixing.id}"', f"mixing = [{atoms}]", "",
        ]
    for key, pairs in (("star", design.star_pairs), ("fosd", design.fosd_menus)):
        for sp in pairs:
            lines += [
                f"[[{key}]]", f'menu = "{sp.menu}"',
                f'dominant = "{sp.dominant}"', f'dominated = "{sp.dominated}"', "",
            ]
    (p / "fixtures.toml").write_text("\n".join(lines), encoding="utf-8")


def taxonomy_disagreements(design: ExperimentDesign) -> list[dict]:
    """Menus whose declared label differs from the exact recomputation."""
    out = []
    for mid in design.menu_order:
        declared = design.declared.get(mid)
        if declared is None:
            continue
        computed = computed_label(design, mid)
        if (declared.relation, declared.dominant) != (computed.relation, computed.dominant):
            out.append(
                {
                    "menu": mid,
                    "lotteries": sorted(design.menus[mid]),
                    "declared": declared.relation,
                    "declared_dominant": declared.dominant,
                    "computed": computed.relation,
                    "computed_dominant": computed.dominant,
                }
            )
    return out


__all__ = [
    "DesignError", "DominanceKind", "DominancePair", "ExperimentDesign", "Fixtures",
    "IndependencePair", "MenuLabel", "Taxonomy", "Triple", "builtin_design",
    "computed_label", "computed_pairs", "load_design", "load_design_dir", "mixture_map",
    "taxonomy_disagreements", "write_design_dir",
]
