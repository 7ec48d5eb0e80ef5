import random

import pytest

from intervaltok import (
    ConfigMismatchError,
    EmptyInputError,
    GrammarError,
    GridSpec,
    NoteEvent,
    PayloadKind,
    QuantizedScore,
    RangeError,
    ReferenceKind,
    ReferenceStream,
    StrategyConfig,
    TokenSequence,
    TokenType,
    detokenize,
    extract_bottomline,
    extract_skyline,
    interval_class_decompose,
    intervalize,
    partition,
    tokenize,
    transpose,
    validate_external_reference,
)
from conftest import golden_tokens
from gen import random_quantized_score
from oracles import partition_covers


def score_of(*notes, sigs=((0, 4, 4),)):
    return QuantizedScore(time_signatures=sigs, notes=tuple(notes), grid=GridSpec())


def ref_of(*notes, kind=ReferenceKind.EXTERNAL):
    return ReferenceStream(events=tuple(notes), kind=kind)


def note_triples(notes):
    return sorted((n.pitch, n.onset, n.duration) for n in notes)


ALL_STRATEGIES = [
    ("remi-abs", None),
    ("abs-vpi", "melody"),
    ("abs-vpi", "skyline"),
    ("abs-vpi", "bottomline"),
    ("hpi-vpi", "melody"),
    ("hpi-vpi", "skyline"),
    ("hpi-vpi", "bottomline"),
]


def config_for(strategy, reference, **kwargs):
    return StrategyConfig.from_strategy(strategy, reference=reference, **kwargs)


def tokenize_with(q, strategy, reference, **kwargs):
    cfg = config_for(strategy, reference, **kwargs)
    melody_track = 0 if reference == "melody" else None
    return tokenize(q, cfg, melody_track=melody_track), cfg


class TestPartition:
    def test_segments_by_reference_onsets(self):
        q = score_of(
            NoteEvent(70, 0, 2, 0), NoteEvent(50, 1, 2, 1),
            NoteEvent(72, 2, 2, 0), NoteEvent(52, 3, 2, 1),
        )
        from intervaltok import extract_melody

        part = partition(q, extract_melody(q, 0))  # references at t=0 and t=2
        assert [s.reference.onset for s in part.segments] == [0, 2]
        assert [n.onset for n in part.segments[0].companions] == [1]
        assert [n.onset for n in part.segments[1].companions] == [3]

    def test_pre_first_notes_fold_into_segment_one(self):
        q = score_of(NoteEvent(40, 0, 2, 1), NoteEvent(72, 1, 2, 0))
        ref = ref_of(NoteEvent(72, 1, 2, 0), kind=ReferenceKind.MELODY)
        part = partition(q, ref)
        assert [n.pitch for n in part.segments[0].companions] == [40]
        assert part.pre_reference_notes == 1

    def test_duplicate_reference_note_claims_one_instance(self):
        q = score_of(NoteEvent(60, 0, 4, 0), NoteEvent(60, 0, 4, 0))
        ref = extract_skyline(q)
        part = partition(q, ref)
        assert len(part.segments) == 1
        assert len(part.segments[0].companions) == 1

    def test_covers_random_scores(self):
        for seed in range(150):
            q = random_quantized_score(random.Random(seed), max_notes=60)
            for extractor in (extract_skyline, extract_bottomline):
                part = partition(q, extractor(q))
                assert partition_covers(part, q)
                assert part.note_count() == len(q.notes)

    def test_external_reference_all_notes_are_companions(self):
        q = score_of(NoteEvent(60, 0, 4, 0), NoteEvent(64, 5, 4, 0))
        ref = validate_external_reference([NoteEvent(48, 0, 4, 0), NoteEvent(48, 4, 4, 0)], q)
        part = partition(q, ref)
        assert part.external_reference
        assert sum(len(s.companions) for s in part.segments) == 2
        assert [n.pitch for n in part.segments[1].companions] == [64]


class TestIntervalize:
    def test_hpi_drops_first_reference(self):
        q = score_of(NoteEvent(60, 0, 4, 0), NoteEvent(67, 4, 4, 0))
        cfg = config_for("hpi-vpi", "skyline")
        enc = intervalize(partition(q, extract_skyline(q)), cfg)
        assert len(enc.events) == 1
        assert enc.events[0].payload_kind is PayloadKind.HORIZONTAL
        assert enc.events[0].value == 7

    def test_vpi_against_segment_reference(self):
        q = score_of(NoteEvent(60, 0, 4, 0), NoteEvent(64, 0, 4, 1))
        cfg = config_for("abs-vpi", "bottomline")
        enc = intervalize(partition(q, extract_bottomline(q)), cfg)
        vertical = [e for e in enc.events if e.payload_kind is PayloadKind.VERTICAL]
        assert [e.value for e in vertical] == [4]

    def test_absolute_identity(self):
        q = score_of(NoteEvent(60, 0, 4, 0), NoteEvent(64, 0, 4, 1))
        cfg = StrategyConfig.from_strategy("remi-abs")
        seq = tokenize(q, cfg)
        pitches = [t.value for t in seq.tokens if t.type is TokenType.PITCH]
        assert pitches == [60, 64]

    def test_clamp_saturates_and_counts(self):
        q = score_of(NoteEvent(20, 0, 4, 0), NoteEvent(110, 0, 4, 1))
        cfg = config_for("abs-vpi", "bottomline")
        enc = intervalize(partition(q, extract_bottomline(q)), cfg)
        vertical = [e for e in enc.events if e.payload_kind is PayloadKind.VERTICAL]
        assert vertical[0].value == 48
        assert enc.diagnostics.clamped_intervals == 1

    def test_payload_counts(self):
        for seed in range(40):
            q = random_quantized_score(random.Random(seed), max_notes=60)
            ref = extract_skyline(q)
            tau = len(ref)
            n = len(q.notes)
            for strategy, n_ref_expected in (("abs-vpi", tau), ("hpi-vpi", tau - 1)):
                cfg = config_for(strategy, "skyline")
                enc = intervalize(partition(q, ref), cfg)
                vertical = sum(
                    1 for e in enc.events if e.payload_kind is PayloadKind.VERTICAL
                )
                refs = sum(1 for e in enc.events if e.is_reference)
                assert vertical == n - tau
                assert refs == n_ref_expected


class TestDecompose:
    @pytest.mark.parametrize("i,expected", [(16, (1, 4)), (-14, (-2, 10)), (0, (0, 0))])
    def test_examples(self, i, expected):
        assert interval_class_decompose(i) == expected

    def test_exhaustive_round_trip(self):
        for i in range(-48, 49):
            octave, cls = interval_class_decompose(i)
            assert 12 * octave + cls == i
            assert 0 <= cls <= 11


class TestTokenizeGolden:
    def test_degenerate_single_note(self):
        q = score_of(NoteEvent(60, 0, 4, 0))
        seq, _ = tokenize_with(q, "remi-abs", None)
        assert seq.to_strings() == ["Bar", "Position_0", "Pitch_60", "Duration_4"]

    @pytest.mark.parametrize("strategy,reference", ALL_STRATEGIES)
    def test_matches_hand_derivation(self, golden_score, strategy, reference):
        seq, _ = tokenize_with(golden_score, strategy, reference)
        assert seq.to_strings() == golden_tokens(strategy, reference)

    def test_transposed_hpi_stream_identical(self, golden_score):
        seq, cfg = tokenize_with(golden_score, "hpi-vpi", "skyline")
        transposed = tokenize(transpose(golden_score, 3), cfg)
        assert transposed.tokens == seq.tokens


class TestTranspositionInvariance:
    def test_full_invariance_hpi_vpi(self):
        for seed in range(25):
            q = random_quantized_score(random.Random(seed), max_notes=60)
            for reference in ("melody", "skyline", "bottomline"):
                seq, cfg = tokenize_with(q, "hpi-vpi", reference)
                for k in (-12, -5, 7, 12):
                    qt = transpose(q, k)
                    seq_t = tokenize(qt, cfg, melody_track=0 if reference == "melody" else None)
                    assert seq_t.tokens == seq.tokens

    def test_partial_invariance_abs_vpi(self):
        for seed in range(25):
            q = random_quantized_score(random.Random(seed), max_notes=60)
            seq, cfg = tokenize_with(q, "abs-vpi", "skyline")
            vpis = [t for t in seq.tokens if t.type is TokenType.VPI]
            for k in (-7, 4, 12):
                seq_t = tokenize(transpose(q, k), cfg)
                vpis_t = [t for t in seq_t.tokens if t.type is TokenType.VPI]
                assert vpis_t == vpis
                others = [
                    (t.type, t.value) for t in seq.tokens if t.type is not TokenType.PITCH
                ]
                others_t = [
                    (t.type, t.value) for t in seq_t.tokens if t.type is not TokenType.PITCH
                ]
                assert others == others_t


class TestDetokenize:
    @pytest.mark.parametrize("strategy,reference", [
        ("remi-abs", None),
        ("abs-vpi", "melody"), ("abs-vpi", "skyline"), ("abs-vpi", "bottomline"),
    ])
    def test_exact_inverse_for_absolute_references(self, strategy, reference):
        for seed in range(30):
            q = random_quantized_score(random.Random(seed), max_notes=60)
            seq, cfg = tokenize_with(q, strategy, reference)
            back = detokenize(seq, cfg, time_signatures=q.time_signatures)
            assert note_triples(back.notes) == note_triples(q.notes)

    def test_all_notes_on_track_zero(self):
        q = random_quantized_score(random.Random(3), max_notes=30, max_tracks=4)
        seq, cfg = tokenize_with(q, "remi-abs", None)
        back = detokenize(seq, cfg, time_signatures=q.time_signatures)
        assert {n.track for n in back.notes} == {0}

    def test_hpi_with_true_anchor(self, golden_score):
        seq, cfg = tokenize_with(golden_score, "hpi-vpi", "skyline")
        first_ref = extract_skyline(golden_score).events[0]
        back = detokenize(seq, cfg, anchor_pitch=first_ref.pitch,
                          time_signatures=golden_score.time_signatures)
        expected = note_triples(golden_score.notes)
        expected.remove((first_ref.pitch, first_ref.onset, first_ref.duration))
        assert note_triples(back.notes) == expected

    def test_hpi_anchor_shift_transposes(self, golden_score):
        seq, cfg = tokenize_with(golden_score, "hpi-vpi", "skyline")
        base = detokenize(seq, cfg, anchor_pitch=72,
                          time_signatures=golden_score.time_signatures)
        shifted = detokenize(seq, cfg, anchor_pitch=77,
                             time_signatures=golden_score.time_signatures)
        assert note_triples(shifted.notes) == note_triples(transpose(base, 5).notes)

    def test_token_idempotence_through_quantized_domain(self):
        for seed in range(20):
            q = random_quantized_score(random.Random(seed), max_notes=50)
            for strategy, reference in (("remi-abs", None), ("abs-vpi", "skyline"),
                                        ("abs-vpi", "bottomline")):
                seq, cfg = tokenize_with(q, strategy, reference)
                back = detokenize(seq, cfg, time_signatures=q.time_signatures)
                again = tokenize(back, cfg)
                assert again.tokens == seq.tokens

    def test_oct_class_round_trip(self):
        for seed in range(15):
            q = random_quantized_score(random.Random(seed), max_notes=40)
            seq, cfg = tokenize_with(q, "abs-vpi", "bottomline", interval_form="oct-class")
            back = detokenize(seq, cfg, time_signatures=q.time_signatures)
            assert note_triples(back.notes) == note_triples(q.notes)

    def test_pre_first_companions_resolve_against_first_reference(self):
        # melody starts after the accompaniment
        q = score_of(NoteEvent(40, 0, 4, 1), NoteEvent(72, 4, 4, 0), NoteEvent(60, 4, 4, 1))
        cfg = config_for("abs-vpi", "melody")
        seq = tokenize(q, cfg, melody_track=0)
        back = detokenize(seq, cfg, time_signatures=q.time_signatures)
        assert note_triples(back.notes) == note_triples(q.notes)

    def test_grammar_error_on_corrupt_stream(self):
        cfg = StrategyConfig.from_strategy("remi-abs")
        bad = TokenSequence.from_strings(["Bar", "Duration_1"])
        with pytest.raises(GrammarError):
            detokenize(bad, cfg)

    def test_range_error_on_cumulative_overflow(self):
        cfg = config_for("hpi-vpi", "skyline")
        stream = ["Bar", "Position_0"]
        for _ in range(3):
            stream += ["HPI_+30", "Duration_1"]
        seq = TokenSequence.from_strings(stream)
        with pytest.raises(RangeError):
            detokenize(seq, cfg, anchor_pitch=60)

    def test_fingerprint_mismatch(self, golden_score):
        seq, _ = tokenize_with(golden_score, "abs-vpi", "skyline")
        other = StrategyConfig.from_strategy("abs-vpi", reference="bottomline")
        with pytest.raises(ConfigMismatchError):
            detokenize(seq, other)

    def test_round_trip_with_time_signature_changes(self):
        sigs = ((0, 4, 4), (16, 3, 4), (40, 6, 8))
        notes = tuple(
            NoteEvent(50 + (i * 5) % 30, i * 3, 2 + i % 4, i % 2) for i in range(25)
        )
        q = QuantizedScore(time_signatures=sigs, notes=notes, grid=GridSpec())
        seq, cfg = tokenize_with(q, "abs-vpi", "skyline")
        back = detokenize(seq, cfg, time_signatures=sigs)
        assert note_triples(back.notes) == note_triples(q.notes)


class TestExternalReference:
    def test_tonic_pedal_encodes_like_in_score_reference(self):
        q = score_of(NoteEvent(60, 0, 4, 0), NoteEvent(64, 4, 4, 0))
        ref = validate_external_reference(
            [NoteEvent(48, 0, 16, 0), NoteEvent(48, 16, 16, 0)], q
        )
        cfg = StrategyConfig.from_strategy("abs-vpi", reference="external")
        seq = tokenize(q, cfg, external_ref=ref)
        assert seq.to_strings() == [
            "Bar", "Position_0", "Pitch_48", "Duration_16", "VPI_+12", "Duration_4",
            "Position_4", "VPI_+16", "Duration_4",
            "Bar", "Position_0", "Pitch_48", "Duration_16",
        ]

    def test_external_reference_notes_come_back_on_decode(self):
        q = score_of(NoteEvent(60, 0, 4, 0))
        ref = validate_external_reference([NoteEvent(48, 0, 16, 0)], q)
        cfg = StrategyConfig.from_strategy("abs-vpi", reference="external")
        seq = tokenize(q, cfg, external_ref=ref)
        back = detokenize(seq, cfg, time_signatures=q.time_signatures)
        assert note_triples(back.notes) == [(48, 0, 16), (60, 0, 4)]

    def test_reference_argument_consistency(self):
        q = score_of(NoteEvent(60, 0, 4, 0))
        melody_cfg = StrategyConfig.from_strategy("abs-vpi", reference="melody")
        with pytest.raises(ValueError):
            tokenize(q, melody_cfg)  # missing melody_track
        skyline_cfg = StrategyConfig.from_strategy("abs-vpi", reference="skyline")
        with pytest.raises(ValueError):
            tokenize(q, skyline_cfg, melody_track=0)

    def test_empty_score_under_interval_strategy(self):
        q = score_of()
        cfg = StrategyConfig.from_strategy("abs-vpi", reference="skyline")
        with pytest.raises(EmptyInputError):
            tokenize(q, cfg)

    def test_empty_score_under_absolute_strategy(self):
        q = score_of()
        seq = tokenize(q, StrategyConfig.from_strategy("remi-abs"))
        assert seq.to_strings() == []
