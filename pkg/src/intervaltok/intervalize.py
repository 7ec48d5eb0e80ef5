"""Partition of a score by its reference stream and pitch-to-interval conversion.

The reference stream splits the score into segments, one per reference
note, each also holding the non-reference notes sounding until the next
reference onset. Reference pitches are encoded absolutely or as
horizontal intervals from the previous reference pitch (dropping the
first reference note entirely); other notes are encoded absolutely or as
vertical intervals from their segment's reference pitch.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .config import NonRefEncoding, RefEncoding, StrategyConfig
from .encoding import Diagnostics, EncodedEvents, EncodedNote, PayloadKind
from .errors import ConfigMismatchError, GrammarError, RangeError
from .reference import (
    ReferenceKind,
    ReferenceStream,
    extract_bottomline,
    extract_melody,
    extract_skyline,
)
from .remi import TokenSequence, TokenType, emit, validate
from .score import (
    BarLayout,
    GridSpec,
    NoteEvent,
    QuantizedScore,
    Score,
    TimeSignature,
    quantize,
)


@dataclass(frozen=True, slots=True)
class Segment:
    """One reference note and the non-reference notes it governs."""

    reference: NoteEvent
    companions: tuple[NoteEvent, ...]


@dataclass(frozen=True, slots=True)
class Partition:
    segments: tuple[Segment, ...]
    time_signatures: tuple[TimeSignature, ...]
    external_reference: bool = False
    pre_reference_notes: int = 0  # notes folded into segment 1 from before ref 1

    def note_count(self) -> int:
        per_segment = sum(len(s.companions) for s in self.segments)
        if not self.external_reference:
            per_segment += len(self.segments)
        return per_segment


def partition(score: QuantizedScore, ref: ReferenceStream) -> Partition:
    """Split the score's notes into one segment per reference event.

    A non-reference note belongs to the segment of the last reference
    onset at or before it; notes earlier than the first reference onset
    fold into segment 1. With an in-score reference, each reference event
    claims exactly one matching note instance.
    """
    notes = score.notes
    external = ref.kind is ReferenceKind.EXTERNAL
    used = [False] * len(notes)
    if not external:
        pool: dict[NoteEvent, list[int]] = {}
        for i, n in enumerate(notes):
            pool.setdefault(n, []).append(i)
        for e in ref.events:
            indices = pool.get(e)
            if not indices:
                raise ValueError(f"reference event {e} is not a note of the score")
            used[indices.pop(0)] = True

    onsets = list(ref.onsets())
    companions: list[list[NoteEvent]] = [[] for _ in ref.events]
    pre_first = 0
    for i, n in enumerate(notes):
        if used[i]:
            continue
        j = bisect_right(onsets, n.onset) - 1
        if j < 0:
            j = 0
            pre_first += 1
        companions[j].append(n)

    segments = tuple(
        Segment(reference=e, companions=tuple(c)) for e, c in zip(ref.events, companions)
    )
    return Partition(
        segments=segments,
        time_signatures=score.time_signatures,
        external_reference=external,
        pre_reference_notes=pre_first,
    )


def interval_class_decompose(interval: int) -> tuple[int, int]:
    """Split an interval into (octaves, class) with interval == 12*oct + class.

    The class is always in 0..11; octaves use floor division, so -14
    becomes (-2, 10).
    """
    return interval // 12, interval % 12


def intervalize(part: Partition, cfg: StrategyConfig) -> EncodedEvents:
    """Encode partitioned notes under the config's pitch encodings.

    With a horizontal reference encoding the first reference note is
    omitted entirely. Intervals beyond +/-clamp saturate and are counted
    in the diagnostics.
    """
    clamp = cfg.clamp
    clamped = 0

    def saturate(interval: int) -> int:
        nonlocal clamped
        if interval > clamp:
            clamped += 1
            return clamp
        if interval < -clamp:
            clamped += 1
            return -clamp
        return interval

    # Emission order within a position: reference first, then by pitch,
    # duration, track. Sorting on original pitches keeps the order stable
    # after detokenization collapses tracks.
    entries: list[tuple[tuple, EncodedNote]] = []
    for j, seg in enumerate(part.segments):
        r = seg.reference
        if cfg.i_ref is RefEncoding.ABSOLUTE:
            entries.append(
                (
                    (r.onset, 0, r.pitch, r.duration, r.track),
                    EncodedNote(PayloadKind.ABSOLUTE, r.pitch, r.onset, r.duration, True),
                )
            )
        elif j > 0:
            step = saturate(r.pitch - part.segments[j - 1].reference.pitch)
            entries.append(
                (
                    (r.onset, 0, r.pitch, r.duration, r.track),
                    EncodedNote(PayloadKind.HORIZONTAL, step, r.onset, r.duration, True),
                )
            )
        for n in seg.companions:
            if cfg.i_nonref is NonRefEncoding.ABSOLUTE:
                note = EncodedNote(PayloadKind.ABSOLUTE, n.pitch, n.onset, n.duration, False)
            else:
                interval = saturate(n.pitch - r.pitch)
                note = EncodedNote(PayloadKind.VERTICAL, interval, n.onset, n.duration, False)
            entries.append(((n.onset, 1, n.pitch, n.duration, n.track), note))
    entries.sort(key=lambda e: e[0])

    return EncodedEvents(
        events=tuple(e for _, e in entries),
        time_signatures=part.time_signatures,
        interval_form=cfg.interval_form,
        config_fingerprint=cfg.fingerprint,
        diagnostics=Diagnostics(
            clamped_intervals=clamped, pre_reference_notes=part.pre_reference_notes
        ),
    )


def extract_reference(
    q: QuantizedScore,
    cfg: StrategyConfig,
    melody_track: int | None = None,
    external_ref: ReferenceStream | None = None,
) -> ReferenceStream:
    """Extract or accept the reference stream named by the config."""
    kind = cfg.reference_kind
    if kind is ReferenceKind.MELODY:
        if melody_track is None:
            raise ValueError("a melody reference needs melody_track")
        return extract_melody(q, melody_track)
    if kind is ReferenceKind.SKYLINE:
        return extract_skyline(q)
    if kind is ReferenceKind.BOTTOMLINE:
        return extract_bottomline(q)
    if kind is ReferenceKind.EXTERNAL:
        if external_ref is None:
            raise ValueError("an external reference needs external_ref")
        return external_ref
    raise ValueError(f"no reference stream for {kind}")


def _check_reference_args(cfg, melody_track, external_ref):
    if (cfg.reference_kind is ReferenceKind.MELODY) != (melody_track is not None):
        raise ValueError("melody_track is required iff the reference is the melody")
    if (cfg.reference_kind is ReferenceKind.EXTERNAL) != (external_ref is not None):
        raise ValueError("external_ref is required iff the reference is external")


def _as_quantized(score, grid: GridSpec) -> QuantizedScore:
    if isinstance(score, QuantizedScore):
        if score.grid != grid:
            raise ValueError("quantized score grid differs from the config grid")
        return score
    return quantize(score, grid)


def tokenize(
    score: Score | QuantizedScore,
    cfg: StrategyConfig,
    melody_track: int | None = None,
    external_ref: ReferenceStream | None = None,
) -> TokenSequence:
    """Full pipeline: quantize, extract reference, partition, encode, emit."""
    _check_reference_args(cfg, melody_track, external_ref)
    q = _as_quantized(score, cfg.grid)
    if cfg.is_plain_absolute:
        events = tuple(
            EncodedNote(PayloadKind.ABSOLUTE, n.pitch, n.onset, n.duration, False)
            for n in sorted(q.notes, key=lambda n: (n.onset, n.pitch, n.duration, n.track))
        )
        encoded = EncodedEvents(
            events=events,
            time_signatures=q.time_signatures,
            interval_form=cfg.interval_form,
            config_fingerprint=cfg.fingerprint,
        )
    else:
        ref = extract_reference(q, cfg, melody_track, external_ref)
        encoded = intervalize(partition(q, ref), cfg)
    return emit(encoded, cfg.grid)


@dataclass
class DecodedGroup:
    """One note decoded from a token stream, with its token span."""

    kind: PayloadKind
    value: int
    onset: int
    duration: int
    is_reference: bool
    token_indices: tuple[int, ...]
    pitch: int | None = None


def decode_groups(
    seq: TokenSequence,
    cfg: StrategyConfig,
    anchor_pitch: int = 60,
    time_signatures: tuple[TimeSignature, ...] = ((0, 4, 4),),
) -> list[DecodedGroup]:
    """Parse a validated token sequence back into notes with resolved pitches.

    Under a horizontal reference encoding the anchor supplies the dropped
    first reference pitch; reference pitches accumulate from it. Vertical
    intervals resolve against the governing reference pitch; those seen
    before any reference resolve against the first one (or the anchor).
    """
    if seq.config_fingerprint and seq.config_fingerprint != cfg.fingerprint:
        raise ConfigMismatchError("token sequence fingerprint does not match config")
    violations = validate(seq, cfg)
    if violations:
        first = violations[0]
        raise GrammarError(
            f"{len(violations)} grammar violation(s); first at token {first.index}"
            f" {first.token!r}: {first.message}"
        )

    layout = BarLayout(time_signatures, cfg.grid)
    groups: list[DecodedGroup] = []
    bar = -1
    onset: int | None = None
    pending: list[int] = []  # token indices of the open payload group
    kind: PayloadKind | None = None
    value = 0
    is_ref = False

    abs_refs = cfg.i_ref is RefEncoding.ABSOLUTE and cfg.uses_vertical
    for i, tok in enumerate(seq.tokens):
        t = tok.type
        if t is TokenType.BAR:
            bar += 1
        elif t is TokenType.POSITION:
            onset = layout.bar_start(bar) + tok.value
        elif t is TokenType.PITCH:
            pending, kind, value = [i], PayloadKind.ABSOLUTE, tok.value
            is_ref = abs_refs
        elif t is TokenType.VPI:
            pending, kind, value, is_ref = [i], PayloadKind.VERTICAL, tok.value, False
        elif t is TokenType.HPI:
            pending, kind, value, is_ref = [i], PayloadKind.HORIZONTAL, tok.value, True
        elif t is TokenType.VOCT:
            pending, kind, value, is_ref = [i], PayloadKind.VERTICAL, 12 * tok.value, False
        elif t is TokenType.HOCT:
            pending, kind, value, is_ref = [i], PayloadKind.HORIZONTAL, 12 * tok.value, True
        elif t in (TokenType.VIC, TokenType.HIC):
            pending.append(i)
            value += tok.value
        elif t is TokenType.DURATION:
            groups.append(
                DecodedGroup(
                    kind=kind,
                    value=value,
                    onset=onset,
                    duration=tok.value,
                    is_reference=is_ref,
                    token_indices=tuple(pending + [i]),
                )
            )
            pending, kind = [], None

    current_ref: int | None = anchor_pitch if cfg.uses_horizontal else None
    unresolved: list[DecodedGroup] = []
    for g in groups:
        if g.kind is PayloadKind.ABSOLUTE:
            g.pitch = g.value
            if g.is_reference:
                for d in unresolved:
                    d.pitch = g.value + d.value
                unresolved.clear()
                current_ref = g.value
        elif g.kind is PayloadKind.HORIZONTAL:
            current_ref = current_ref + g.value
            g.pitch = current_ref
        else:
            if current_ref is None:
                unresolved.append(g)
            else:
                g.pitch = current_ref + g.value
    if unresolved:
        raise GrammarError("vertical intervals with no reference pitch in the sequence")
    for g in groups:
        if not 0 <= g.pitch <= 127:
            raise RangeError(f"decoded pitch {g.pitch} leaves 0..127")
    return groups


def detokenize(
    seq: TokenSequence,
    cfg: StrategyConfig,
    anchor_pitch: int = 60,
    time_signatures: tuple[TimeSignature, ...] = ((0, 4, 4),),
) -> QuantizedScore:
    """Invert tokenize up to track identity (all notes land on track 0).

    With an absolute reference encoding this recovers pitch, onset and
    duration exactly. With a horizontal one, anchor_pitch stands in for
    the dropped first reference pitch (which shifts all reference-derived
    pitches if it differs from the original); the dropped first reference
    note itself is not re-emitted. Time signatures cannot be carried by
    the tokens, so they are supplied here (grid units; default 4/4).
    """
    groups = decode_groups(seq, cfg, anchor_pitch, time_signatures)
    notes = tuple(NoteEvent(g.pitch, g.onset, g.duration, 0) for g in groups)
    return QuantizedScore(time_signatures=time_signatures, notes=notes, grid=cfg.grid)
