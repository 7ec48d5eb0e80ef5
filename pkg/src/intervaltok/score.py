"""Score data model and time quantization onto the token grid.

Scores keep tick-based time; tempo is ignored throughout. A
:class:`QuantizedScore` expresses onsets and durations in grid units,
where one unit is ``1 / subdivisions_per_beat`` of a quarter note.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import RangeError

# Supported time signatures: denominator a power of two up to 16,
# numerator at most 16, and a bar no longer than MAX_BAR_QUARTERS quarter
# notes. The bounds keep the Position/Duration vocabularies closed.
SUPPORTED_DENOMINATORS = (1, 2, 4, 8, 16)
MAX_NUMERATOR = 16
MAX_BAR_QUARTERS = 16

TimeSignature = tuple[int, int, int]  # (bar-start time, numerator, denominator)


def is_supported_time_signature(numerator: int, denominator: int) -> bool:
    return (
        denominator in SUPPORTED_DENOMINATORS
        and 1 <= numerator <= MAX_NUMERATOR
        and numerator * 4 <= MAX_BAR_QUARTERS * denominator
    )


@dataclass(frozen=True, slots=True)
class NoteEvent:
    """A single note: MIDI pitch plus onset/duration in ticks or grid units."""

    pitch: int
    onset: int
    duration: int
    track: int = 0

    def __post_init__(self):
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch {self.pitch} outside 0..127")
        if self.onset < 0:
            raise ValueError(f"onset {self.onset} < 0")
        if self.duration < 1:
            raise ValueError(f"duration {self.duration} < 1")
        if self.track < 0:
            raise ValueError(f"track {self.track} < 0")

    def sort_key(self) -> tuple[int, int, int, int]:
        """Canonical order: (onset, track, pitch, duration); total up to identity."""
        return (self.onset, self.track, self.pitch, self.duration)


@dataclass(frozen=True, slots=True)
class GridSpec:
    """Metric grid: units per beat and the duration cap in bars."""

    subdivisions_per_beat: int = 4
    max_duration_bars: int = 4

    def __post_init__(self):
        if self.subdivisions_per_beat < 1:
            raise ValueError("subdivisions_per_beat must be >= 1")
        if self.max_duration_bars < 1:
            raise ValueError("max_duration_bars must be >= 1")

    def positions_per_bar(self, numerator: int, denominator: int) -> int:
        """Grid units in one bar of the given time signature."""
        if not is_supported_time_signature(numerator, denominator):
            raise ValueError(f"unsupported time signature {numerator}/{denominator}")
        positions = numerator * self.subdivisions_per_beat * 4
        if positions % denominator != 0:
            raise ValueError(
                f"time signature {numerator}/{denominator} does not fit a "
                f"{self.subdivisions_per_beat}-per-beat grid"
            )
        return positions // denominator

    @property
    def max_positions_per_bar(self) -> int:
        """Largest bar, in grid units, over all supported time signatures."""
        return MAX_BAR_QUARTERS * self.subdivisions_per_beat

    @property
    def max_duration(self) -> int:
        """Upper bound of the Duration token range, in grid units."""
        return self.max_duration_bars * self.max_positions_per_bar

    def to_dict(self) -> dict:
        return {
            "subdivisions_per_beat": self.subdivisions_per_beat,
            "max_duration_bars": self.max_duration_bars,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(
            subdivisions_per_beat=int(d["subdivisions_per_beat"]),
            max_duration_bars=int(d["max_duration_bars"]),
        )


def _canonical_notes(notes) -> tuple[NoteEvent, ...]:
    return tuple(sorted(notes, key=NoteEvent.sort_key))


def _check_time_signatures(sigs: tuple[TimeSignature, ...]):
    if not sigs:
        raise ValueError("time_signatures must be non-empty")
    if sigs[0][0] != 0:
        raise ValueError("first time signature must start at time 0")
    for (t0, _, _), (t1, _, _) in zip(sigs, sigs[1:]):
        if t1 <= t0:
            raise ValueError("time signatures must be strictly sorted by start time")
    for _, num, den in sigs:
        if not is_supported_time_signature(num, den):
            raise ValueError(f"unsupported time signature {num}/{den}")


@dataclass(frozen=True, slots=True)
class Score:
    """A tick-based score: note events plus the time-signature map."""

    ticks_per_quarter: int
    time_signatures: tuple[TimeSignature, ...] = ((0, 4, 4),)
    notes: tuple[NoteEvent, ...] = ()

    def __post_init__(self):
        if self.ticks_per_quarter <= 0:
            raise ValueError("ticks_per_quarter must be > 0")
        sigs = tuple((int(t), int(n), int(d)) for t, n, d in self.time_signatures)
        _check_time_signatures(sigs)
        object.__setattr__(self, "time_signatures", sigs)
        object.__setattr__(self, "notes", _canonical_notes(self.notes))

    def to_dict(self) -> dict:
        return {
            "ticks_per_quarter": self.ticks_per_quarter,
            "time_signatures": [list(ts) for ts in self.time_signatures],
            "notes": [
                {"pitch": n.pitch, "onset": n.onset, "duration": n.duration, "track": n.track}
                for n in self.notes
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Score":
        return cls(
            ticks_per_quarter=int(d["ticks_per_quarter"]),
            time_signatures=tuple(tuple(ts) for ts in d["time_signatures"]),
            notes=tuple(NoteEvent(**n) for n in d["notes"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "Score":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, slots=True)
class QuantizedScore:
    """A score with onsets/durations in grid units of ``grid``."""

    time_signatures: tuple[TimeSignature, ...]
    notes: tuple[NoteEvent, ...]
    grid: GridSpec = field(default_factory=GridSpec)

    def __post_init__(self):
        sigs = tuple((int(t), int(n), int(d)) for t, n, d in self.time_signatures)
        _check_time_signatures(sigs)
        object.__setattr__(self, "time_signatures", sigs)
        object.__setattr__(self, "notes", _canonical_notes(self.notes))

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "time_signatures": [list(ts) for ts in self.time_signatures],
            "notes": [
                {"pitch": n.pitch, "onset": n.onset, "duration": n.duration, "track": n.track}
                for n in self.notes
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "QuantizedScore":
        return cls(
            time_signatures=tuple(tuple(ts) for ts in d["time_signatures"]),
            notes=tuple(NoteEvent(**n) for n in d["notes"]),
            grid=GridSpec.from_dict(d["grid"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "QuantizedScore":
        return cls.from_dict(json.loads(text))


class BarLayout:
    """Maps grid-unit times to (bar index, position) and back.

    Each time-signature change starts a new bar; a bar cut short by a
    change still counts as one bar.
    """

    def __init__(self, time_signatures: tuple[TimeSignature, ...], grid: GridSpec):
        self.grid = grid
        starts = []  # (segment start unit, positions per bar, first bar index)
        bars_before = 0
        sigs = list(time_signatures)
        for i, (start, num, den) in enumerate(sigs):
            ppb = grid.positions_per_bar(num, den)
            starts.append((start, ppb, bars_before))
            if i + 1 < len(sigs):
                length = sigs[i + 1][0] - start
                bars_before += -(-length // ppb)  # ceil division
        self._segments = starts

    def _segment_at(self, time: int):
        seg = self._segments[0]
        for cand in self._segments:
            if cand[0] <= time:
                seg = cand
            else:
                break
        return seg

    def locate(self, time: int) -> tuple[int, int]:
        """Return (bar index, position within bar) of a grid-unit time."""
        start, ppb, bars_before = self._segment_at(time)
        offset = time - start
        return bars_before + offset // ppb, offset % ppb

    def bar_start(self, bar: int) -> int:
        """Grid-unit time at which the given bar index begins."""
        seg = self._segments[0]
        for cand in self._segments:
            if cand[2] <= bar:
                seg = cand
            else:
                break
        start, ppb, bars_before = seg
        return start + (bar - bars_before) * ppb

    def positions_in_bar(self, bar: int) -> int:
        seg = self._segments[0]
        for cand in self._segments:
            if cand[2] <= bar:
                seg = cand
            else:
                break
        return seg[1]

    def duration_cap(self, time: int) -> int:
        """Duration clamp at a given onset: max_duration_bars of its bar size."""
        _, ppb, _ = self._segment_at(time)
        return self.grid.max_duration_bars * ppb


def _round_half_up(numerator: int, denominator: int) -> int:
    """Round numerator/denominator to the nearest integer, ties up."""
    return (2 * numerator + denominator) // (2 * denominator)


def quantize(score: Score, grid: GridSpec | None = None) -> QuantizedScore:
    """Snap a tick-based score onto the grid.

    Onsets round to the nearest grid unit (ties round up); durations round
    the same way, then clamp to [1, max_duration_bars bars at the onset's
    time signature]. Note count is preserved.
    """
    grid = grid or GridSpec()
    tpq = score.ticks_per_quarter
    subdiv = grid.subdivisions_per_beat
    sigs = tuple(
        (_round_half_up(t * subdiv, tpq), n, d) for t, n, d in score.time_signatures
    )
    layout = BarLayout(sigs, grid)
    notes = []
    for n in score.notes:
        onset = _round_half_up(n.onset * subdiv, tpq)
        duration = _round_half_up(n.duration * subdiv, tpq)
        duration = max(1, min(duration, layout.duration_cap(onset)))
        notes.append(NoteEvent(n.pitch, onset, duration, n.track))
    return QuantizedScore(time_signatures=sigs, notes=tuple(notes), grid=grid)


def to_ticks(q: QuantizedScore, ticks_per_quarter: int | None = None) -> Score:
    """Expand a quantized score back to ticks (one grid unit = tpq/subdivisions)."""
    subdiv = q.grid.subdivisions_per_beat
    tpq = ticks_per_quarter if ticks_per_quarter is not None else 120 * subdiv
    if tpq % subdiv != 0:
        raise ValueError(f"ticks_per_quarter {tpq} not divisible by {subdiv} subdivisions")
    unit = tpq // subdiv
    return Score(
        ticks_per_quarter=tpq,
        time_signatures=tuple((t * unit, n, d) for t, n, d in q.time_signatures),
        notes=tuple(
            NoteEvent(n.pitch, n.onset * unit, n.duration * unit, n.track) for n in q.notes
        ),
    )


def transpose(score, semitones: int):
    """Shift every pitch by ``semitones``; raises RangeError if any pitch leaves 0..127.

    Works on both Score and QuantizedScore, returning the same type.
    """
    shifted = []
    for n in score.notes:
        pitch = n.pitch + semitones
        if not 0 <= pitch <= 127:
            raise RangeError(f"pitch {n.pitch} {semitones:+d} leaves 0..127")
        shifted.append(NoteEvent(pitch, n.onset, n.duration, n.track))
    if isinstance(score, QuantizedScore):
        return QuantizedScore(
            time_signatures=score.time_signatures, notes=tuple(shifted), grid=score.grid
        )
    return Score(
        ticks_per_quarter=score.ticks_per_quarter,
        time_signatures=score.time_signatures,
        notes=tuple(shifted),
    )
