import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intervaltok import (
    BarLayout,
    GridSpec,
    NoteEvent,
    QuantizedScore,
    RangeError,
    Score,
    quantize,
    to_ticks,
    transpose,
)
from gen import random_quantized_score


class TestNoteEvent:
    def test_field_validation(self):
        with pytest.raises(ValueError):
            NoteEvent(pitch=128, onset=0, duration=1)
        with pytest.raises(ValueError):
            NoteEvent(pitch=60, onset=-1, duration=1)
        with pytest.raises(ValueError):
            NoteEvent(pitch=60, onset=0, duration=0)

    def test_canonical_order_is_total(self):
        a = NoteEvent(60, 0, 4, 0)
        b = NoteEvent(60, 0, 5, 0)
        assert a.sort_key() != b.sort_key()
        assert a.sort_key() == NoteEvent(60, 0, 4, 0).sort_key()


class TestScore:
    def test_notes_canonicalized(self):
        s = Score(
            ticks_per_quarter=480,
            notes=(NoteEvent(70, 100, 10, 1), NoteEvent(50, 0, 10, 0), NoteEvent(60, 0, 10, 0)),
        )
        assert [n.pitch for n in s.notes] == [50, 60, 70]

    def test_duplicate_notes_kept(self):
        s = Score(ticks_per_quarter=480, notes=(NoteEvent(60, 0, 10, 0),) * 2)
        assert len(s.notes) == 2

    def test_time_signature_validation(self):
        with pytest.raises(ValueError):
            Score(ticks_per_quarter=480, time_signatures=((480, 4, 4),))
        with pytest.raises(ValueError):
            Score(ticks_per_quarter=480, time_signatures=((0, 4, 4), (0, 3, 4)))
        with pytest.raises(ValueError):
            Score(ticks_per_quarter=480, time_signatures=((0, 4, 32),))

    def test_json_round_trip(self):
        s = Score(
            ticks_per_quarter=480,
            time_signatures=((0, 4, 4), (1920, 3, 4)),
            notes=(NoteEvent(60, 0, 480, 0), NoteEvent(64, 480, 240, 1)),
        )
        assert Score.from_json(s.to_json()) == s

    def test_quantized_json_round_trip(self):
        q = QuantizedScore(
            time_signatures=((0, 4, 4),),
            notes=(NoteEvent(60, 0, 4, 0),),
            grid=GridSpec(subdivisions_per_beat=2),
        )
        assert QuantizedScore.from_json(q.to_json()) == q


class TestQuantize:
    # tpq 480, 4 subdivisions -> one unit is 120 ticks
    def test_onset_rounds_to_nearest(self):
        s = Score(ticks_per_quarter=480, notes=(NoteEvent(60, 479, 480, 0),))
        q = quantize(s, GridSpec())
        assert q.notes[0].onset == 4

    def test_short_duration_clamps_to_one_unit(self):
        s = Score(ticks_per_quarter=480, notes=(NoteEvent(60, 0, 10, 0),))
        q = quantize(s, GridSpec())
        assert q.notes[0].duration == 1

    def test_ties_round_up(self):
        s = Score(ticks_per_quarter=480, notes=(NoteEvent(60, 180, 180, 0),))
        q = quantize(s, GridSpec())
        assert q.notes[0].onset == 2
        assert q.notes[0].duration == 2  # 1.5 units -> 2

    def test_duration_cap(self):
        # 4/4 bar = 16 units; cap = 4 bars = 64 units
        s = Score(ticks_per_quarter=480, notes=(NoteEvent(60, 0, 480 * 4 * 8, 0),))
        q = quantize(s, GridSpec())
        assert q.notes[0].duration == 64

    def test_note_count_preserved(self):
        rng = random.Random(1)
        notes = tuple(
            NoteEvent(60, rng.randrange(4000), rng.randint(1, 3000), 0) for _ in range(50)
        )
        q = quantize(Score(ticks_per_quarter=480, notes=notes), GridSpec())
        assert len(q.notes) == 50

    @settings(max_examples=60)
    @given(st.integers(0, 10_000))
    def test_idempotent_on_own_output(self, seed):
        q = random_quantized_score(random.Random(seed), max_notes=30)
        assert quantize(to_ticks(q), q.grid) == q

    def test_idempotent_with_odd_tpq(self):
        q = random_quantized_score(random.Random(7), max_notes=20)
        assert quantize(to_ticks(q, 480), q.grid) == q


class TestTranspose:
    def test_identity(self):
        q = random_quantized_score(random.Random(2), max_notes=20)
        assert transpose(q, 0) == q

    def test_shift(self):
        s = Score(ticks_per_quarter=480, notes=(NoteEvent(60, 0, 480, 0),))
        assert transpose(s, 12).notes[0].pitch == 72

    def test_out_of_range(self):
        s = Score(ticks_per_quarter=480, notes=(NoteEvent(120, 0, 480, 0),))
        with pytest.raises(RangeError):
            transpose(s, 12)

    @settings(max_examples=40)
    @given(st.integers(0, 10_000), st.integers(-12, 12))
    def test_round_trip(self, seed, k):
        q = random_quantized_score(random.Random(seed), max_notes=30)
        assert transpose(transpose(q, k), -k) == q


class TestGridSpec:
    def test_positions_per_bar(self):
        g = GridSpec()
        assert g.positions_per_bar(4, 4) == 16
        assert g.positions_per_bar(6, 8) == 12
        assert g.positions_per_bar(3, 4) == 12
        assert g.positions_per_bar(2, 2) == 16

    def test_unsupported_signature(self):
        g = GridSpec()
        with pytest.raises(ValueError):
            g.positions_per_bar(4, 32)
        with pytest.raises(ValueError):
            g.positions_per_bar(99, 4)

    def test_non_integral_grid(self):
        with pytest.raises(ValueError):
            GridSpec(subdivisions_per_beat=1).positions_per_bar(3, 8)

    def test_vocab_caps(self):
        g = GridSpec()
        assert g.max_positions_per_bar == 64
        assert g.max_duration == 256


class TestBarLayout:
    def test_single_signature(self):
        layout = BarLayout(((0, 4, 4),), GridSpec())
        assert layout.locate(0) == (0, 0)
        assert layout.locate(17) == (1, 1)
        assert layout.bar_start(2) == 32

    def test_signature_change(self):
        # one 4/4 bar (16 units) then 3/4 bars (12 units)
        layout = BarLayout(((0, 4, 4), (16, 3, 4)), GridSpec())
        assert layout.locate(15) == (0, 15)
        assert layout.locate(16) == (1, 0)
        assert layout.locate(29) == (2, 1)
        assert layout.bar_start(2) == 28

    def test_signature_change_cuts_bar_short(self):
        # 4/4 cut after 10 units: the partial bar still counts as bar 0
        layout = BarLayout(((0, 4, 4), (10, 3, 4)), GridSpec())
        assert layout.locate(9) == (0, 9)
        assert layout.locate(10) == (1, 0)
        assert layout.bar_start(1) == 10

    def test_locate_bar_start_inverse(self):
        layout = BarLayout(((0, 4, 4), (16, 3, 4), (52, 6, 8)), GridSpec())
        for t in range(0, 120):
            bar, pos = layout.locate(t)
            assert layout.bar_start(bar) + pos == t

    def test_duration_cap_follows_signature(self):
        layout = BarLayout(((0, 4, 4), (16, 3, 4)), GridSpec())
        assert layout.duration_cap(0) == 64
        assert layout.duration_cap(20) == 48
