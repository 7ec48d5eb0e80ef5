"""Standard MIDI File (format 0/1) reading and writing.

Only what the tokenizer needs survives ingestion: matched note events and
time signatures. Velocities are discarded, tempo and all other meta
events are ignored, and score time stays tick-based.
"""
from __future__ import annotations

import struct
import warnings
from collections import deque

from .errors import DanglingNoteWarning, ParseError
from .score import NoteEvent, Score, is_supported_time_signature

_HEADER = b"MThd"
_TRACK = b"MTrk"


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def read(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ParseError(f"unexpected end of data at byte {self.pos}")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.read(1)[0]

    def u16(self) -> int:
        return struct.unpack(">H", self.read(2))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.read(4))[0]

    def varlen(self) -> int:
        value = 0
        for _ in range(4):
            byte = self.u8()
            value = (value << 7) | (byte & 0x7F)
            if not byte & 0x80:
                return value
        raise ParseError(f"variable-length quantity too long at byte {self.pos}")


def _channel_message_length(status: int) -> int:
    return 1 if status & 0xF0 in (0xC0, 0xD0) else 2


def _parse_track(reader: _Reader, track_index: int, length: int, notes, time_sigs):
    """Parse one MTrk chunk, appending matched notes and time signatures."""
    end = reader.pos + length
    tick = 0
    running_status = None
    # FIFO per (channel, pitch): a note-off closes the oldest open note-on
    open_notes: dict[tuple[int, int], deque[int]] = {}

    def close(channel: int, pitch: int, off_tick: int) -> bool:
        queue = open_notes.get((channel, pitch))
        if not queue:
            return False
        onset = queue.popleft()
        duration = max(1, off_tick - onset)
        notes.append(NoteEvent(pitch, onset, duration, track_index))
        return True

    while reader.pos < end:
        tick += reader.varlen()
        status = reader.u8()
        if status < 0x80:
            if running_status is None:
                raise ParseError(f"data byte {status:#04x} without running status")
            reader.pos -= 1
            status = running_status
        if status == 0xFF:
            meta_type = reader.u8()
            meta = reader.read(reader.varlen())
            if meta_type == 0x58 and len(meta) >= 2:
                numerator, denom_power = meta[0], meta[1]
                denominator = 1 << denom_power
                if not is_supported_time_signature(numerator, denominator):
                    raise ParseError(
                        f"unsupported time signature {numerator}/{denominator} at tick {tick}"
                    )
                time_sigs.append((tick, numerator, denominator))
            elif meta_type == 0x2F:
                reader.pos = end
                break
        elif status in (0xF0, 0xF7):
            reader.read(reader.varlen())
            running_status = None
        elif status >= 0xF0:
            raise ParseError(f"unexpected system message {status:#04x} at byte {reader.pos}")
        else:
            running_status = status
            payload = reader.read(_channel_message_length(status))
            if any(b & 0x80 for b in payload):
                raise ParseError(f"corrupt data byte in channel message at byte {reader.pos}")
            kind = status & 0xF0
            channel = status & 0x0F
            if kind == 0x90 and payload[1] > 0:
                open_notes.setdefault((channel, payload[0]), deque()).append(tick)
            elif kind == 0x80 or (kind == 0x90 and payload[1] == 0):
                close(channel, payload[0], tick)

    if reader.pos != end:
        raise ParseError(f"track {track_index} overruns its declared length")
    dangling = sum(len(q) for q in open_notes.values())
    if dangling:
        warnings.warn(
            f"track {track_index}: {dangling} note-on(s) without note-off, "
            f"closed at track end",
            DanglingNoteWarning,
            stacklevel=3,
        )
        for (channel, pitch), queue in sorted(open_notes.items()):
            while queue:
                close(channel, pitch, tick)


def _merge_time_signatures(raw: list[tuple[int, int, int]]) -> tuple:
    """Sort by tick, keep the last entry per tick, default to 4/4 at tick 0."""
    by_tick: dict[int, tuple[int, int, int]] = {}
    for tick, num, den in raw:
        by_tick[tick] = (tick, num, den)
    merged = [by_tick[t] for t in sorted(by_tick)]
    if not merged or merged[0][0] != 0:
        merged.insert(0, (0, 4, 4))
    return tuple(merged)


def parse_smf(data: bytes) -> Score:
    """Parse a format 0/1 Standard MIDI File into a Score.

    Note-on/note-off pairs are matched FIFO per (track, channel, pitch);
    a note-on with velocity 0 counts as note-off. A dangling note-on is
    closed at track end with a DanglingNoteWarning. Zero-length notes get
    duration 1 tick so the note count is preserved.
    """
    reader = _Reader(bytes(data))
    if reader.read(4) != _HEADER:
        raise ParseError("not a Standard MIDI File: missing MThd header")
    header_length = reader.u32()
    if header_length < 6:
        raise ParseError(f"malformed MThd chunk: length {header_length} < 6")
    fmt = reader.u16()
    declared_tracks = reader.u16()
    division = reader.u16()
    reader.read(header_length - 6)
    if fmt not in (0, 1):
        raise ParseError(f"unsupported SMF format {fmt}; only 0 and 1 are handled")
    if division & 0x8000:
        raise ParseError("SMPTE time division is not supported")
    if division == 0:
        raise ParseError("ticks per quarter note must be > 0")

    notes: list[NoteEvent] = []
    time_sigs: list[tuple[int, int, int]] = []
    track_index = 0
    while track_index < declared_tracks:
        if reader.pos >= len(reader.data):
            raise ParseError(
                f"header declares {declared_tracks} tracks but data ends after {track_index}"
            )
        tag = reader.read(4)
        length = reader.u32()
        if tag == _TRACK:
            _parse_track(reader, track_index, length, notes, time_sigs)
            track_index += 1
        else:
            reader.read(length)  # skip alien chunks

    return Score(
        ticks_per_quarter=division,
        time_signatures=_merge_time_signatures(time_sigs),
        notes=tuple(notes),
    )


def _varlen(value: int) -> bytes:
    out = bytearray([value & 0x7F])
    value >>= 7
    while value:
        out.insert(0, 0x80 | (value & 0x7F))
        value >>= 7
    return bytes(out)


def _denominator_power(denominator: int) -> int:
    power = denominator.bit_length() - 1
    if 1 << power != denominator:
        raise ValueError(f"denominator {denominator} is not a power of two")
    return power


def write_smf(score: Score, velocity: int = 64) -> bytes:
    """Serialize a Score as a Standard MIDI File.

    One MTrk chunk per track index (format 0 for a single track, format 1
    otherwise); time signatures go into the first chunk. At equal ticks,
    note-offs are written before note-ons so FIFO re-parsing matches.
    """
    n_tracks = max((n.track for n in score.notes), default=0) + 1
    chunks = []
    for track_index in range(n_tracks):
        events = []  # (tick, order, message bytes)
        if track_index == 0:
            for tick, num, den in score.time_signatures:
                meta = bytes([0xFF, 0x58, 0x04, num, _denominator_power(den), 24, 8])
                events.append((tick, 0, meta))
        for n in score.notes:
            if n.track != track_index:
                continue
            channel = 0
            events.append((n.onset + n.duration, 1, bytes([0x80 | channel, n.pitch, 0])))
            events.append((n.onset, 2, bytes([0x90 | channel, n.pitch, velocity])))
        events.sort(key=lambda e: (e[0], e[1], e[2]))
        body = bytearray()
        tick = 0
        for event_tick, _, message in events:
            body += _varlen(event_tick - tick)
            body += message
            tick = event_tick
        body += _varlen(0) + bytes([0xFF, 0x2F, 0x00])
        chunks.append(_TRACK + struct.pack(">I", len(body)) + bytes(body))

    fmt = 0 if n_tracks == 1 else 1
    header = _HEADER + struct.pack(">IHHH", 6, fmt, n_tracks, score.ticks_per_quarter)
    return header + b"".join(chunks)
