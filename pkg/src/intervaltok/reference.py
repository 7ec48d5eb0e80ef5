"""Monophonic reference streams: melody, skyline, bottom-line, external.

All extractors share one tie-break chain so corpus runs are reproducible:
preferred pitch first (highest for skyline, lowest for bottom-line), then
longer duration, then lower track index.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import EmptyInputError, MonophonyError
from .score import BarLayout, NoteEvent, QuantizedScore


class ReferenceKind(str, Enum):
    MELODY = "melody"
    SKYLINE = "skyline"
    BOTTOMLINE = "bottomline"
    EXTERNAL = "external"


@dataclass(frozen=True, slots=True)
class ReferenceStream:
    """A monophonic sequence of reference notes in grid units."""

    events: tuple[NoteEvent, ...]
    kind: ReferenceKind

    def __post_init__(self):
        if not self.events:
            raise EmptyInputError("reference stream must contain at least one event")
        for a, b in zip(self.events, self.events[1:]):
            if b.onset <= a.onset:
                raise MonophonyError(
                    f"reference onsets must strictly increase; got {a.onset} then {b.onset}"
                )

    def __len__(self) -> int:
        return len(self.events)

    def onsets(self) -> tuple[int, ...]:
        return tuple(e.onset for e in self.events)


def _group_by_onset(notes) -> dict[int, list[NoteEvent]]:
    groups: dict[int, list[NoteEvent]] = {}
    for n in notes:
        groups.setdefault(n.onset, []).append(n)
    return groups


def _pick(group: list[NoteEvent], highest: bool) -> NoteEvent:
    """One note per onset: extreme pitch, then longer duration, then lower track."""
    sign = 1 if highest else -1
    return max(group, key=lambda n: (sign * n.pitch, n.duration, -n.track))


def _extract(notes, kind: ReferenceKind, highest: bool) -> ReferenceStream:
    groups = _group_by_onset(notes)
    if not groups:
        raise EmptyInputError("cannot extract a reference from an empty score")
    events = tuple(_pick(groups[onset], highest) for onset in sorted(groups))
    return ReferenceStream(events=events, kind=kind)


def extract_skyline(score: QuantizedScore) -> ReferenceStream:
    """The highest note at every onset of the score."""
    return _extract(score.notes, ReferenceKind.SKYLINE, highest=True)


def extract_bottomline(score: QuantizedScore) -> ReferenceStream:
    """The lowest note at every onset of the score."""
    return _extract(score.notes, ReferenceKind.BOTTOMLINE, highest=False)


def extract_melody(score: QuantizedScore, melody_track: int) -> ReferenceStream:
    """The notes of one track, reduced by the skyline rule where it is polyphonic."""
    track_notes = [n for n in score.notes if n.track == melody_track]
    if not track_notes:
        raise EmptyInputError(f"track {melody_track} has no notes")
    stream = _extract(track_notes, ReferenceKind.MELODY, highest=True)
    return stream


def validate_external_reference(events, score: QuantizedScore) -> ReferenceStream:
    """Validate an externally supplied event list as a reference stream.

    Events need not be notes of the score. They are sorted by onset;
    duplicate onsets raise MonophonyError. Durations are clamped the same
    way quantize clamps score notes.
    """
    events = list(events)
    if not events:
        raise EmptyInputError("external reference is empty")
    events.sort(key=lambda e: e.onset)
    for a, b in zip(events, events[1:]):
        if b.onset == a.onset:
            raise MonophonyError(f"external reference has two events at onset {a.onset}")
    layout = BarLayout(score.time_signatures, score.grid)
    clamped = tuple(
        NoteEvent(e.pitch, e.onset, min(e.duration, layout.duration_cap(e.onset)), e.track)
        for e in events
    )
    return ReferenceStream(events=clamped, kind=ReferenceKind.EXTERNAL)
