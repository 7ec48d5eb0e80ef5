import random

import pytest

from intervaltok import (
    CodecError,
    ConfigMismatchError,
    GridSpec,
    StrategyConfig,
    build_vocab,
    decode_ids,
    encode_ids,
    tokenize,
)
from intervaltok.vocab import Vocabulary
from gen import random_quantized_score
from oracles import vocab_size_formula


def all_configs():
    for strategy, reference in [("remi-abs", None), ("abs-vpi", "skyline"), ("hpi-vpi", "melody")]:
        for form in ("plain", "oct-class"):
            for clamp in (12, 48, 50):
                for subdiv in (2, 4):
                    yield StrategyConfig.from_strategy(
                        strategy, reference=reference, interval_form=form, clamp=clamp,
                        grid=GridSpec(subdivisions_per_beat=subdiv),
                    )


class TestBuild:
    def test_specials_pinned(self):
        v = build_vocab(StrategyConfig.from_strategy("remi-abs"))
        assert v.tokens[:4] == ("PAD", "MASK", "BOS", "EOS")

    def test_rest_sorted_lexicographically(self):
        v = build_vocab(StrategyConfig.from_strategy("remi-abs"))
        rest = list(v.tokens[4:])
        assert rest == sorted(rest)

    def test_clamp_48_gives_97_vpi_tokens(self):
        v = build_vocab(StrategyConfig.from_strategy("abs-vpi", reference="skyline"))
        assert sum(1 for t in v.tokens if t.startswith("VPI_")) == 97

    def test_remi_abs_has_no_interval_tokens(self):
        v = build_vocab(StrategyConfig.from_strategy("remi-abs"))
        assert not any(t.startswith(("VPI_", "HPI_", "VOct", "HOct", "VIC", "HIC"))
                       for t in v.tokens)

    def test_hpi_vpi_has_no_pitch_tokens(self):
        v = build_vocab(StrategyConfig.from_strategy("hpi-vpi", reference="skyline"))
        assert not any(t.startswith("Pitch_") for t in v.tokens)

    def test_oct_class_ranges(self):
        cfg = StrategyConfig.from_strategy(
            "hpi-vpi", reference="skyline", interval_form="oct-class", clamp=50
        )
        v = build_vocab(cfg)
        vocts = sorted(int(t.split("_")[1]) for t in v.tokens if t.startswith("VOct_"))
        assert vocts == list(range(-5, 5))  # floor(-50/12) .. floor(50/12)
        assert sum(1 for t in v.tokens if t.startswith("VIC_")) == 12

    def test_deterministic_builds(self):
        cfg = StrategyConfig.from_strategy("abs-vpi", reference="bottomline")
        assert build_vocab(cfg).to_json() == build_vocab(cfg).to_json()

    @pytest.mark.parametrize("cfg", list(all_configs()), ids=lambda c: c.fingerprint[:8])
    def test_size_matches_combinatorial_recount(self, cfg):
        assert len(build_vocab(cfg)) == vocab_size_formula(cfg)


class TestCodec:
    def test_encode_decode_inverse_on_emitted_sequences(self):
        cfg = StrategyConfig.from_strategy("abs-vpi", reference="skyline")
        v = build_vocab(cfg)
        for seed in range(10):
            q = random_quantized_score(random.Random(seed), max_notes=40)
            seq = tokenize(q, cfg)
            ids = encode_ids(seq, v)
            assert decode_ids(ids, v) == seq

    def test_id_out_of_range(self):
        v = build_vocab(StrategyConfig.from_strategy("remi-abs"))
        with pytest.raises(CodecError):
            decode_ids([len(v)], v)

    def test_unknown_token(self):
        v = build_vocab(StrategyConfig.from_strategy("remi-abs"))
        with pytest.raises(CodecError):
            v.token_to_id("VPI_+4")

    def test_fingerprint_mismatch(self):
        cfg_a = StrategyConfig.from_strategy("abs-vpi", reference="skyline")
        cfg_b = StrategyConfig.from_strategy("abs-vpi", reference="bottomline")
        q = random_quantized_score(random.Random(0), max_notes=10)
        seq = tokenize(q, cfg_a)
        with pytest.raises(ConfigMismatchError):
            encode_ids(seq, build_vocab(cfg_b))

    def test_bijection(self):
        v = build_vocab(StrategyConfig.from_strategy("hpi-vpi", reference="skyline"))
        for i in range(len(v)):
            assert v.token_to_id(v.id_to_token(i)) == i


class TestSerialization:
    def test_save_load_round_trip(self, tmp_path):
        v = build_vocab(StrategyConfig.from_strategy("abs-vpi", reference="skyline"))
        path = tmp_path / "vocab.json"
        v.save(path)
        loaded = Vocabulary.load(path)
        assert loaded == v
        loaded.save(tmp_path / "again.json")
        assert (tmp_path / "again.json").read_bytes() == path.read_bytes()

    def test_remi_abs_reference_normalized_into_fingerprint(self):
        a = StrategyConfig.from_strategy("remi-abs", reference="skyline")
        b = StrategyConfig.from_strategy("remi-abs", reference="bottomline")
        assert a.fingerprint == b.fingerprint
