"""Note-level label alignment onto token streams, and interval histograms.

Label files are JSON objects mapping a piece key (its input path, or the
basename as a fallback) to rows of {"onset": int, "pitch": int | null,
"label": str} in grid units; a null or missing pitch is a wildcard that
matches every note at that onset. Every token of a labeled note's group
(payload tokens plus Duration) carries the note's label id; Bar, Position
and special tokens carry IGNORE (-1).
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .config import StrategyConfig
from .encoding import PayloadKind
from .intervalize import decode_groups
from .remi import TokenSequence
from .score import TimeSignature

IGNORE_LABEL = -1


@dataclass(frozen=True, slots=True)
class LabelRow:
    onset: int
    pitch: int | None
    label: str


def parse_label_rows(rows) -> list[LabelRow]:
    out = []
    for r in rows:
        pitch = r.get("pitch")
        if pitch == "*":
            pitch = None
        out.append(LabelRow(onset=int(r["onset"]), pitch=pitch, label=str(r["label"])))
    return out


def load_label_file(path) -> dict[str, list[LabelRow]]:
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    return {key: parse_label_rows(rows) for key, rows in data.items()}


def rows_for_piece(table: dict[str, list[LabelRow]], piece_path: str) -> list[LabelRow]:
    """Look a piece up by its exact path, falling back to the basename."""
    if piece_path in table:
        return table[piece_path]
    return table.get(os.path.basename(piece_path), [])


@dataclass(frozen=True, slots=True)
class AlignedLabels:
    """Per-token label ids plus the id -> name table and match diagnostics."""

    label_ids: tuple[int, ...]
    label_names: tuple[str, ...]
    unmatched_rows: int = 0

    def name_of(self, label_id: int) -> str | None:
        if label_id == IGNORE_LABEL:
            return None
        return self.label_names[label_id]


def align_labels(
    seq: TokenSequence,
    rows: list[LabelRow],
    cfg: StrategyConfig,
    anchor_pitch: int = 60,
    time_signatures: tuple[TimeSignature, ...] = ((0, 4, 4),),
    label_names: tuple[str, ...] | None = None,
) -> AlignedLabels:
    """Project note-level labels onto every token of the notes' groups.

    Rows are applied in file order; a later row overrides an earlier one
    on the same note. A row matching zero notes only bumps the unmatched
    counter. Pitch-specific rows match decoded pitches, which are exact
    for absolute-reference configs; under a horizontal reference they are
    anchor-relative, so wildcard rows are the robust choice there.
    """
    groups = decode_groups(seq, cfg, anchor_pitch, time_signatures)
    if label_names is None:
        label_names = tuple(sorted({r.label for r in rows}))
    ids = {name: i for i, name in enumerate(label_names)}

    per_group = [IGNORE_LABEL] * len(groups)
    unmatched = 0
    for row in rows:
        hit = False
        for gi, g in enumerate(groups):
            if g.onset == row.onset and (row.pitch is None or g.pitch == row.pitch):
                per_group[gi] = ids[row.label]
                hit = True
        if not hit:
            unmatched += 1

    token_labels = [IGNORE_LABEL] * len(seq.tokens)
    for g, label in zip(groups, per_group):
        for i in g.token_indices:
            token_labels[i] = label
    return AlignedLabels(
        label_ids=tuple(token_labels),
        label_names=label_names,
        unmatched_rows=unmatched,
    )


@dataclass(frozen=True, slots=True)
class HistogramBin:
    count: int = 0
    false_positives: int = 0


@dataclass
class HistogramReport:
    """Vertical-interval counts per label value.

    Without predictions, tokens group by their true label. With
    predictions, they group by the predicted label; a token whose true
    label differs is a false positive inside that bar.
    """

    counts: dict[str, dict[int, HistogramBin]] = field(default_factory=dict)

    def add(self, label: str, interval: int, false_positive: bool):
        bucket = self.counts.setdefault(label, {})
        bin_ = bucket.get(interval, HistogramBin())
        bucket[interval] = HistogramBin(
            count=bin_.count + 1,
            false_positives=bin_.false_positives + (1 if false_positive else 0),
        )

    def total(self) -> int:
        return sum(b.count for bucket in self.counts.values() for b in bucket.values())

    def merge(self, other: "HistogramReport"):
        for label, bucket in other.counts.items():
            for interval, bin_ in bucket.items():
                mine = self.counts.setdefault(label, {}).get(interval, HistogramBin())
                self.counts[label][interval] = HistogramBin(
                    count=mine.count + bin_.count,
                    false_positives=mine.false_positives + bin_.false_positives,
                )


def histogram(
    seq: TokenSequence,
    true_labels: AlignedLabels,
    predicted_labels: AlignedLabels | None,
    cfg: StrategyConfig,
    anchor_pitch: int = 60,
    time_signatures: tuple[TimeSignature, ...] = ((0, 4, 4),),
) -> HistogramReport:
    """Count vertical-interval tokens per label value.

    Each vertical payload group counts once under its interval value
    (octave+class pairs are recomposed). Groups labeled IGNORE are
    skipped.
    """
    groups = decode_groups(seq, cfg, anchor_pitch, time_signatures)
    report = HistogramReport()
    for g in groups:
        if g.kind is not PayloadKind.VERTICAL:
            continue
        payload_index = g.token_indices[0]
        true_id = true_labels.label_ids[payload_index]
        if predicted_labels is None:
            if true_id == IGNORE_LABEL:
                continue
            report.add(true_labels.name_of(true_id), g.value, False)
        else:
            pred_id = predicted_labels.label_ids[payload_index]
            if pred_id == IGNORE_LABEL:
                continue
            pred_name = predicted_labels.name_of(pred_id)
            true_name = true_labels.name_of(true_id)
            report.add(pred_name, g.value, true_name != pred_name)
    return report
