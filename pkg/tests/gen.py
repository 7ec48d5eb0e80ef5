"""Seeded random score generators shared by unit and acceptance tests.

Pitches stay within a 48-semitone band (36..84) so the default clamp
never saturates and +/-12 transpositions stay inside the MIDI range.
"""
import random

from intervaltok import GridSpec, NoteEvent, QuantizedScore


def random_quantized_score(
    rng: random.Random,
    max_notes: int = 200,
    max_tracks: int = 4,
    bars: int = 8,
    pitch_lo: int = 36,
    pitch_hi: int = 84,
    grid: GridSpec | None = None,
) -> QuantizedScore:
    grid = grid or GridSpec()
    ppb = grid.positions_per_bar(4, 4)
    n_tracks = rng.randint(1, max_tracks)
    n_notes = rng.randint(1, max_notes)
    notes = []
    for i in range(n_notes):
        notes.append(
            NoteEvent(
                pitch=rng.randint(pitch_lo, pitch_hi),
                onset=rng.randrange(bars * ppb),
                duration=rng.randint(1, 2 * ppb),
                track=0 if i == 0 else rng.randrange(n_tracks),  # track 0 never empty
            )
        )
    return QuantizedScore(time_signatures=((0, 4, 4),), notes=tuple(notes), grid=grid)


def without_same_pitch_overlaps(q: QuantizedScore) -> QuantizedScore:
    """Drop notes that partially overlap an earlier same-(track, pitch) note.

    SMF cannot represent those unambiguously (FIFO note-off matching
    reassigns their durations), so write/parse round-trip tests exclude
    them. Equal onsets are fine and kept.
    """
    kept = []
    for n in q.notes:  # canonical order: earlier onsets first
        clash = any(
            k.track == n.track and k.pitch == n.pitch and k.onset < n.onset < k.onset + k.duration
            for k in kept
        )
        if not clash:
            kept.append(n)
    return QuantizedScore(time_signatures=q.time_signatures, notes=tuple(kept), grid=q.grid)


def write_fixture_corpus(rng: random.Random, directory, count: int = 6, **kwargs):
    """Write small random scores as .mid files; returns the paths in order."""
    from intervaltok import to_ticks, write_smf

    max_notes = kwargs.pop("max_notes", 40)
    paths = []
    for i in range(count):
        q = random_quantized_score(rng, max_notes=max_notes, **kwargs)
        path = directory / f"piece_{i:02d}.mid"
        path.write_bytes(write_smf(to_ticks(q)))
        paths.append(path)
    return paths
