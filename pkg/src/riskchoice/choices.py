"""Choice records, round slicing, merged correspondences and empirical
choice probabilities."""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .design import ExperimentDesign

DEFER = "DEFER"


class ChoiceDataError(ValueError):
    """Malformed choice data."""


@dataclass(frozen=True)
class ChoiceRecord:
    subject_id: str
    trial_index: int
    menu_id: str
    choice: str | None  # None means the subject deferred
    response_time_ms: float | None = None

    @property
    def deferred(self) -> bool:
        return self.choice is None


@dataclass(frozen=True)
class Correspondence:
    """Possibly empty chosen subsets, one per menu.

    A single round's choice function is the special case where every value
    has at most one element.
    """

    subject_id: str
    menus: Mapping[str, frozenset]
    chosen: Mapping[str, frozenset]

    def __getitem__(self, menu_id: str) -> frozenset:
        return self.chosen[menu_id]

    def is_single_valued(self) -> bool:
        return all(len(v) <= 1 for v in self.chosen.values())

    def restrict(self, menu_ids: Iterable[str]) -> "Correspondence":
        keep = [m for m in menu_ids if m in self.chosen]
        return Correspondence(
            self.subject_id, {m: self.menus[m] for m in keep}, {m: self.chosen[m] for m in keep}
        )


@dataclass(frozen=True)
class RoundSlice:
    subject_id: str
    round_index: int
    menus: Mapping[str, frozenset]
    choice: Mapping[str, str | None]
    response_time_ms: Mapping[str, float | None] = field(default_factory=dict)

    def as_correspondence(self) -> Correspondence:
        chosen = {m: frozenset() if c is None else frozenset((c,)) for m, c in self.choice.items()}
        return Correspondence(self.subject_id, self.menus, chosen)


@dataclass(frozen=True)
class ChoiceProbabilities:
    subject_id: str
    menus: Mapping[str, frozenset]
    rounds: int
    # (lottery id, menu id) -> frequency
    prob: Mapping[tuple[str, str], Fraction]
    # menu id -> probability of an active choice
    active: Mapping[str, Fraction]

    def __call__(self, lottery: str, menu_id: str) -> Fraction:
        return self.prob.get((lottery, menu_id), Fraction(0))

    def deferral(self, menu_id: str) -> Fraction:
        return 1 - self.active[menu_id]


@dataclass
class SubjectData:
    subject_id: str
    records: list[ChoiceRecord]
    problems: list[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.problems


@dataclass
class ChoiceDataset:
    design: ExperimentDesign
    subjects: dict[str, SubjectData]

    def complete_subjects(self) -> list[SubjectData]:
        return [self.subjects[s] for s in sorted(self.subjects) if self.subjects[s].complete]

    def incomplete_subjects(self) -> list[SubjectData]:
        return [self.subjects[s] for s in sorted(self.subjects) if not self.subjects[s].complete]


def validate_record(design: ExperimentDesign, rec: ChoiceRecord) -> None:
    if rec.menu_id not in design.menus:
        raise ChoiceDataError(f"subject {rec.subject_id}: unknown menu {rec.menu_id}")
    if rec.choice is not None and rec.choice not in design.menus[rec.menu_id]:
        raise ChoiceDataError(
            f"subject {rec.subject_id}, trial {rec.trial_index}: "
            f"{rec.choice} is not in menu {rec.menu_id}"
        )


def appearance_problems(design: ExperimentDesign, records: Sequence[ChoiceRecord]) -> list[str]:
    counts = Counter(r.menu_id for r in records)
    out = []
    for mid in design.menu_order:
        if counts[mid] != design.rounds_expected:
            out.append(f"menu {mid} appears {counts[mid]} times, expected {design.rounds_expected}")
    return out


def build_dataset(design: ExperimentDesign, records: Iterable[ChoiceRecord]) -> ChoiceDataset:
    """Group validated records by subject and flag incomplete subjects."""
    by_subject: dict[str, list[ChoiceRecord]] = defaultdict(list)
    for rec in records:
        validate_record(design, rec)
        by_subject[rec.subject_id].append(rec)
    if not by_subject:
        raise ChoiceDataError("no choice records")
    subjects = {}
    for sid, recs in by_subject.items():
        recs.sort(key=lambda r: r.trial_index)
        trials = [r.trial_index for r in recs]
        if len(set(trials)) != len(trials):
            raise ChoiceDataError(f"subject {sid}: duplicate trial_index")
        subjects[sid] = SubjectData(sid, recs, appearance_problems(design, recs))
    return ChoiceDataset(design, subjects)


def _parse_rt(raw: str | None) -> float | None:
    if raw is None or not raw.strip():
        return None
    return float(raw)


def read_choice_records(path: str | Path) -> list[ChoiceRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"subject_id", "trial_index", "menu_id", "outcome"}
        if not required <= set(reader.fieldnames or ()):
            raise ChoiceDataError(f"{path}: header must contain {sorted(required)}")
        for line, row in enumerate(reader, start=2):
            try:
                outcome = row["outcome"].strip()
                out.append(
                    ChoiceRecord(
                        subject_id=row["subject_id"].strip(),
                        trial_index=int(row["trial_index"]),
                        menu_id=row["menu_id"].strip(),
                        choice=None if outcome == DEFER else outcome,
                        response_time_ms=_parse_rt(row.get("response_time_ms")),
                    )
                )
            except (ValueError, AttributeError) as exc:
                raise ChoiceDataError(f"{path}:{line}: {exc}") from None
    return out


def load_choices(design: ExperimentDesign, path: str | Path) -> ChoiceDataset:
    records = read_choice_records(path)
    if not records:
        raise ChoiceDataError(f"{path}: no choice records")
    try:
        return build_dataset(design, records)
    except ChoiceDataError as exc:
        raise ChoiceDataError(f"{path}: {exc}") from None


def write_choice_records(records: Iterable[ChoiceRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subject_id", "trial_index", "menu_id", "outcome", "response_time_ms"])
        for r in records:
            rt = "" if r.response_time_ms is None else f"{r.response_time_ms:g}"
            w.writerow([r.subject_id, r.trial_index, r.menu_id, r.choice or DEFER, rt])


def slice_rounds(design: ExperimentDesign, records: Sequence[ChoiceRecord]) -> list[RoundSlice]:
    """Round ``i`` holds each menu's ``i``-th appearance in trial order."""
    by_menu: dict[str, list[ChoiceRecord]] = defaultdict(list)
    for rec in sorted(records, key=lambda r: r.trial_index):
        by_menu[rec.menu_id].append(rec)
    counts = {m: len(by_menu.get(m, ())) for m in design.menu_order}
    k = max(counts.values(), default=0)
    uneven = [m for m, c in counts.items() if c != k]
    if uneven or k == 0:
        raise ChoiceDataError(
            "uneven menu appearances: " + ", ".join(f"{m} x{counts[m]}" for m in uneven or counts)
        )
    sid = records[0].subject_id
    slices = []
    for i in range(k):
        choice = {m: by_menu[m][i].choice for m in design.menu_order}
        rts = {m: by_menu[m][i].response_time_ms for m in design.menu_order}
        slices.append(RoundSlice(sid, i + 1, design.menus, choice, rts))
    return slices


def merge_correspondence(
    slices: Sequence[RoundSlice], threshold: Fraction | float = 0
) -> Correspondence:
    """Union of everything chosen at each menu across rounds.

    With ``threshold > 0`` a lottery enters only if chosen in at least that
    fraction of rounds.
    """
    if not slices:
        raise ValueError("need at least one round")
    threshold = Fraction(threshold)
    n = len(slices)
    chosen = {}
    for mid in slices[0].choice:
        counts = Counter(s.choice[mid] for s in slices if s.choice[mid] is not None)
        chosen[mid] = frozenset(x for x, c in counts.items() if Fraction(c, n) >= threshold)
    return Correspondence(slices[0].subject_id, slices[0].menus, chosen)


def estimate_probabilities(slices: Sequence[RoundSlice]) -> ChoiceProbabilities:
    if not slices:
        raise ValueError("need at least one round")
    n = len(slices)
    prob: dict[tuple[str, str], Fraction] = {}
    active: dict[str, Fraction] = {}
    for mid, items in slices[0].menus.items():
        counts = Counter(s.choice[mid] for s in slices)
        for lid in items:
            prob[(lid, mid)] = Fraction(counts.get(lid, 0), n)
        active[mid] = Fraction(n - counts.get(None, 0), n)
    return ChoiceProbabilities(slices[0].subject_id, slices[0].menus, n, prob, active)
