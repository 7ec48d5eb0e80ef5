"""Closed token vocabulary derived from a StrategyConfig, plus the id codec.

The token space is finite by construction (ranges, not corpus counts), so
train and test vocabularies cannot drift. Ids 0..3 are pinned to PAD,
MASK, BOS, EOS; every other reachable token string follows in
lexicographic order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .config import IntervalForm, StrategyConfig
from .errors import CodecError, ConfigMismatchError
from .remi import SPECIAL_TYPES, TokenSequence, parse_token

_SPECIAL_STRINGS = tuple(t.value for t in SPECIAL_TYPES)


@dataclass(frozen=True)
class Vocabulary:
    """Dense bijection between canonical token strings and ids."""

    tokens: tuple[str, ...]
    config_fingerprint: str
    _ids: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ids = {t: i for i, t in enumerate(self.tokens)}
        if len(ids) != len(self.tokens):
            raise ValueError("vocabulary contains duplicate tokens")
        object.__setattr__(self, "_ids", ids)

    def __len__(self) -> int:
        return len(self.tokens)

    def token_to_id(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise CodecError(f"token {token!r} is not in the vocabulary") from None

    def id_to_token(self, token_id: int) -> str:
        if not 0 <= token_id < len(self.tokens):
            raise CodecError(f"id {token_id} outside vocabulary of size {len(self.tokens)}")
        return self.tokens[token_id]

    def to_json(self) -> str:
        return json.dumps(
            {"fingerprint": self.config_fingerprint, "tokens": list(self.tokens)},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "Vocabulary":
        d = json.loads(text)
        return cls(tokens=tuple(d["tokens"]), config_fingerprint=d["fingerprint"])

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.to_json())
            f.write("\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as f:
            return cls.from_json(f.read())


def reachable_tokens(cfg: StrategyConfig) -> list[str]:
    """All non-special token strings reachable under a config."""
    grid = cfg.grid
    tokens = ["Bar"]
    tokens += [f"Position_{p}" for p in range(grid.max_positions_per_bar)]
    tokens += [f"Duration_{d}" for d in range(1, grid.max_duration + 1)]
    if cfg.uses_absolute_pitch:
        tokens += [f"Pitch_{p}" for p in range(128)]
    oct_lo, oct_hi = cfg.octave_range
    if cfg.uses_vertical:
        if cfg.interval_form is IntervalForm.PLAIN:
            tokens += [f"VPI_{i:+d}" for i in range(-cfg.clamp, cfg.clamp + 1)]
        else:
            tokens += [f"VOct_{o:+d}" for o in range(oct_lo, oct_hi + 1)]
            tokens += [f"VIC_{c}" for c in range(12)]
    if cfg.uses_horizontal:
        if cfg.interval_form is IntervalForm.PLAIN:
            tokens += [f"HPI_{i:+d}" for i in range(-cfg.clamp, cfg.clamp + 1)]
        else:
            tokens += [f"HOct_{o:+d}" for o in range(oct_lo, oct_hi + 1)]
            tokens += [f"HIC_{c}" for c in range(12)]
    return tokens


def build_vocab(cfg: StrategyConfig) -> Vocabulary:
    """Specials at ids 0..3, then every reachable token in lexicographic order."""
    ordered = _SPECIAL_STRINGS + tuple(sorted(reachable_tokens(cfg)))
    return Vocabulary(tokens=ordered, config_fingerprint=cfg.fingerprint)


def _check_fingerprints(a: str, b: str):
    if a and b and a != b:
        raise ConfigMismatchError("sequence and vocabulary fingerprints differ")


def encode_ids(seq: TokenSequence, vocab: Vocabulary) -> list[int]:
    _check_fingerprints(seq.config_fingerprint, vocab.config_fingerprint)
    return [vocab.token_to_id(str(t)) for t in seq.tokens]


def decode_ids(ids, vocab: Vocabulary) -> TokenSequence:
    return TokenSequence(
        tokens=tuple(parse_token(vocab.id_to_token(i)) for i in ids),
        config_fingerprint=vocab.config_fingerprint,
    )
