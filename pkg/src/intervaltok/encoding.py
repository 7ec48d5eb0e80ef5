"""Encoded note events: the intermediate form between pitches and tokens."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .config import IntervalForm
from .score import TimeSignature


class PayloadKind(str, Enum):
    ABSOLUTE = "absolute"
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


@dataclass(frozen=True, slots=True)
class EncodedNote:
    """One note with its pitch payload replaced by an absolute or interval value."""

    payload_kind: PayloadKind
    value: int
    onset: int
    duration: int
    is_reference: bool


@dataclass(frozen=True, slots=True)
class Diagnostics:
    """Counters for lossy or unusual encode decisions; never silent."""

    clamped_intervals: int = 0
    pre_reference_notes: int = 0


@dataclass(frozen=True, slots=True)
class EncodedEvents:
    """Encoded notes in emission order, plus what the emitter needs to place them."""

    events: tuple[EncodedNote, ...]
    time_signatures: tuple[TimeSignature, ...]
    interval_form: IntervalForm = IntervalForm.PLAIN
    config_fingerprint: str = ""
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
