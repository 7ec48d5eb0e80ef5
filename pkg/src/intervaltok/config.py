"""Tokenization strategy configuration and its canonical fingerprint."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum

from .reference import ReferenceKind
from .score import GridSpec


class RefEncoding(str, Enum):
    ABSOLUTE = "absolute"
    HPI = "hpi"


class NonRefEncoding(str, Enum):
    ABSOLUTE = "absolute"
    VPI = "vpi"


class IntervalForm(str, Enum):
    PLAIN = "plain"
    OCT_CLASS = "oct-class"


STRATEGY_NAMES = ("remi-abs", "abs-vpi", "hpi-vpi")


@dataclass(frozen=True, slots=True)
class StrategyConfig:
    """Choice of reference stream, pitch encodings, interval form and grid.

    When both encodings are absolute (plain REMI) the reference is
    irrelevant; reference_kind and interval_form are normalized away so
    equivalent configs share one fingerprint.
    """

    reference_kind: ReferenceKind | None = ReferenceKind.SKYLINE
    i_ref: RefEncoding = RefEncoding.ABSOLUTE
    i_nonref: NonRefEncoding = NonRefEncoding.ABSOLUTE
    interval_form: IntervalForm = IntervalForm.PLAIN
    clamp: int = 48
    grid: GridSpec = field(default_factory=GridSpec)

    def __post_init__(self):
        if self.clamp < 12:
            raise ValueError(f"clamp {self.clamp} must be >= 12")
        if self.i_ref is RefEncoding.HPI and self.i_nonref is not NonRefEncoding.VPI:
            raise ValueError("a horizontal-interval reference requires vertical-interval companions")
        if self.is_plain_absolute:
            object.__setattr__(self, "reference_kind", None)
            object.__setattr__(self, "interval_form", IntervalForm.PLAIN)
        elif self.reference_kind is None:
            raise ValueError("interval encodings need a reference_kind")

    @property
    def is_plain_absolute(self) -> bool:
        return (
            self.i_ref is RefEncoding.ABSOLUTE and self.i_nonref is NonRefEncoding.ABSOLUTE
        )

    @property
    def strategy_name(self) -> str:
        if self.is_plain_absolute:
            return "remi-abs"
        if self.i_ref is RefEncoding.ABSOLUTE:
            return "abs-vpi"
        return "hpi-vpi"

    @property
    def uses_absolute_pitch(self) -> bool:
        return self.i_ref is RefEncoding.ABSOLUTE or self.i_nonref is NonRefEncoding.ABSOLUTE

    @property
    def uses_vertical(self) -> bool:
        return self.i_nonref is NonRefEncoding.VPI

    @property
    def uses_horizontal(self) -> bool:
        return self.i_ref is RefEncoding.HPI

    @property
    def octave_range(self) -> tuple[int, int]:
        """Inclusive octave-token range covering intervals in [-clamp, clamp]."""
        return (-self.clamp) // 12, self.clamp // 12

    @classmethod
    def from_strategy(
        cls,
        strategy: str,
        reference: ReferenceKind | str | None = None,
        interval_form: IntervalForm | str = IntervalForm.PLAIN,
        clamp: int = 48,
        grid: GridSpec | None = None,
    ) -> "StrategyConfig":
        """Build a config from the CLI strategy shorthand."""
        if strategy not in STRATEGY_NAMES:
            raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGY_NAMES}")
        if strategy == "remi-abs":
            i_ref, i_nonref = RefEncoding.ABSOLUTE, NonRefEncoding.ABSOLUTE
            kind = None
        else:
            i_ref = RefEncoding.ABSOLUTE if strategy == "abs-vpi" else RefEncoding.HPI
            i_nonref = NonRefEncoding.VPI
            kind = ReferenceKind(reference) if reference is not None else ReferenceKind.SKYLINE
        return cls(
            reference_kind=kind,
            i_ref=i_ref,
            i_nonref=i_nonref,
            interval_form=IntervalForm(interval_form),
            clamp=clamp,
            grid=grid or GridSpec(),
        )

    def to_dict(self) -> dict:
        return {
            "reference_kind": self.reference_kind.value if self.reference_kind else None,
            "i_ref": self.i_ref.value,
            "i_nonref": self.i_nonref.value,
            "interval_form": self.interval_form.value,
            "clamp": self.clamp,
            "grid": self.grid.to_dict(),
        }

    def to_json(self) -> str:
        """Canonical serialization: sorted keys, compact separators."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "StrategyConfig":
        kind = d.get("reference_kind")
        return cls(
            reference_kind=ReferenceKind(kind) if kind else None,
            i_ref=RefEncoding(d["i_ref"]),
            i_nonref=NonRefEncoding(d["i_nonref"]),
            interval_form=IntervalForm(d["interval_form"]),
            clamp=int(d["clamp"]),
            grid=GridSpec.from_dict(d["grid"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "StrategyConfig":
        return cls.from_dict(json.loads(text))

    @property
    def fingerprint(self) -> str:
        """SHA-256 over the canonical UTF-8 serialization; stable across platforms."""
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()
