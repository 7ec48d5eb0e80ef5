"""REMI token scaffolding: Bar/Position/Duration structure around pitch payloads.

Canonical token spellings (these exact strings appear in JSONL and vocab
files): ``Bar``, ``Position_3``, ``Pitch_60``, ``VPI_+4``, ``VPI_-7``,
``HPI_+7``, ``VOct_+1``, ``VIC_4``, ``HOct_-1``, ``HIC_10``,
``Duration_4``, ``PAD``, ``MASK``, ``BOS``, ``EOS``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .config import IntervalForm, StrategyConfig
from .encoding import EncodedEvents, PayloadKind
from .errors import CodecError, InternalError
from .score import BarLayout, GridSpec


class TokenType(Enum):
    BAR = "Bar"
    POSITION = "Position"
    PITCH = "Pitch"
    VPI = "VPI"
    HPI = "HPI"
    VOCT = "VOct"
    VIC = "VIC"
    HOCT = "HOct"
    HIC = "HIC"
    DURATION = "Duration"
    PAD = "PAD"
    MASK = "MASK"
    BOS = "BOS"
    EOS = "EOS"


SPECIAL_TYPES = (TokenType.PAD, TokenType.MASK, TokenType.BOS, TokenType.EOS)
# Fixed ids for masked-LM consumers.
SPECIAL_IDS = {TokenType.PAD: 0, TokenType.MASK: 1, TokenType.BOS: 2, TokenType.EOS: 3}

_SIGNED_TYPES = (TokenType.VPI, TokenType.HPI, TokenType.VOCT, TokenType.HOCT)
_VALUELESS = SPECIAL_TYPES + (TokenType.BAR,)


@dataclass(frozen=True, slots=True)
class Token:
    type: TokenType
    value: int | None = None

    def __post_init__(self):
        t, v = self.type, self.value
        if t in _VALUELESS:
            if v is not None:
                raise ValueError(f"{t.value} token carries no value")
            return
        if v is None:
            raise ValueError(f"{t.value} token needs a value")
        if t is TokenType.PITCH and not 0 <= v <= 127:
            raise ValueError(f"Pitch {v} outside 0..127")
        if t in (TokenType.VIC, TokenType.HIC) and not 0 <= v <= 11:
            raise ValueError(f"{t.value} {v} outside 0..11")
        if t is TokenType.POSITION and v < 0:
            raise ValueError(f"Position {v} negative")
        if t is TokenType.DURATION and v < 1:
            raise ValueError(f"Duration {v} < 1")

    def __str__(self) -> str:
        if self.type in _VALUELESS:
            return self.type.value
        if self.type in _SIGNED_TYPES:
            return f"{self.type.value}_{self.value:+d}"
        return f"{self.type.value}_{self.value}"


def parse_token(text: str) -> Token:
    """Parse a canonical token string; raises CodecError on unknown forms."""
    for t in _VALUELESS:
        if text == t.value:
            return Token(t)
    prefix, _, payload = text.partition("_")
    if payload:
        for t in TokenType:
            if t.value == prefix and t not in _VALUELESS:
                try:
                    value = int(payload)
                except ValueError:
                    break
                if t in _SIGNED_TYPES and payload[0] not in "+-":
                    break  # signed payloads always spell their sign
                try:
                    return Token(t, value)
                except ValueError:
                    break
    raise CodecError(f"not a canonical token: {text!r}")


@dataclass(frozen=True, slots=True)
class TokenSequence:
    tokens: tuple[Token, ...]
    config_fingerprint: str = ""

    def __len__(self) -> int:
        return len(self.tokens)

    def to_strings(self) -> list[str]:
        return [str(t) for t in self.tokens]

    @classmethod
    def from_strings(cls, strings, config_fingerprint: str = "") -> "TokenSequence":
        return cls(
            tokens=tuple(parse_token(s) for s in strings),
            config_fingerprint=config_fingerprint,
        )


def _payload_tokens(note, form: IntervalForm) -> list[Token]:
    if note.payload_kind is PayloadKind.ABSOLUTE:
        return [Token(TokenType.PITCH, note.value)]
    if note.payload_kind is PayloadKind.VERTICAL:
        oct_type, ic_type, plain = TokenType.VOCT, TokenType.VIC, TokenType.VPI
    else:
        oct_type, ic_type, plain = TokenType.HOCT, TokenType.HIC, TokenType.HPI
    if form is IntervalForm.PLAIN:
        return [Token(plain, note.value)]
    octave, ic = divmod_interval(note.value)
    return [Token(oct_type, octave), Token(ic_type, ic)]


def divmod_interval(interval: int) -> tuple[int, int]:
    """Split an interval into (octaves, class 0..11) with interval == 12*oct + class."""
    return interval // 12, interval % 12


def emit(encoded: EncodedEvents, grid: GridSpec) -> TokenSequence:
    """Render encoded events as a REMI token sequence.

    Every bar up to the last occupied one opens with a Bar token (empty
    bars emit a bare Bar); a Position token precedes the first event at
    each new position; each event contributes one pitch-payload group
    followed by one Duration token.
    """
    layout = BarLayout(encoded.time_signatures, grid)
    tokens: list[Token] = []
    bars_emitted = 0
    current: tuple[int, int] | None = None
    for note in encoded.events:
        bar, pos = layout.locate(note.onset)
        if pos >= layout.positions_in_bar(bar):
            raise InternalError(f"position {pos} outside bar {bar}")
        while bars_emitted <= bar:
            tokens.append(Token(TokenType.BAR))
            bars_emitted += 1
            current = None
        if current != (bar, pos):
            tokens.append(Token(TokenType.POSITION, pos))
            current = (bar, pos)
        tokens.extend(_payload_tokens(note, encoded.interval_form))
        tokens.append(Token(TokenType.DURATION, note.duration))
    return TokenSequence(tokens=tuple(tokens), config_fingerprint=encoded.config_fingerprint)


@dataclass(frozen=True, slots=True)
class GrammarViolation:
    index: int
    token: str
    message: str


_PLAIN_PAYLOADS = (TokenType.PITCH, TokenType.VPI, TokenType.HPI)
_OCT_PAYLOADS = {TokenType.VOCT: TokenType.VIC, TokenType.HOCT: TokenType.HIC}


def _reachable_types(cfg: StrategyConfig) -> set[TokenType]:
    types = {TokenType.BAR, TokenType.POSITION, TokenType.DURATION, *SPECIAL_TYPES}
    if cfg.uses_absolute_pitch:
        types.add(TokenType.PITCH)
    plain = cfg.interval_form is IntervalForm.PLAIN
    if cfg.uses_vertical:
        types.update({TokenType.VPI} if plain else {TokenType.VOCT, TokenType.VIC})
    if cfg.uses_horizontal:
        types.update({TokenType.HPI} if plain else {TokenType.HOCT, TokenType.HIC})
    return types


def validate(seq: TokenSequence, cfg: StrategyConfig | None = None) -> list[GrammarViolation]:
    """Check the REMI grammar; returns one violation per problem, empty if clean.

    Structural rules are always checked. With a config, token variants,
    value ranges and the fingerprint are checked as well. A leading BOS
    and a trailing EOS (with trailing PADs) are tolerated; MASK is not a
    grammatical token.
    """
    violations: list[GrammarViolation] = []

    def flag(i: int, token: Token, message: str):
        violations.append(GrammarViolation(i, str(token), message))

    if cfg is not None:
        reachable = _reachable_types(cfg)
        oct_lo, oct_hi = cfg.octave_range
        if seq.config_fingerprint and seq.config_fingerprint != cfg.fingerprint:
            violations.append(
                GrammarViolation(-1, "", "sequence fingerprint does not match config")
            )

    tokens = seq.tokens
    bars_seen = 0
    position: int | None = None
    expect_ic: TokenType | None = None
    expect_duration = False
    ended = False

    for i, tok in enumerate(tokens):
        t = tok.type
        if cfg is not None and t not in reachable:
            flag(i, tok, f"{t.value} token is not reachable under this config")
        if ended and t is not TokenType.PAD:
            flag(i, tok, "token after EOS")
            continue
        if t is TokenType.BOS:
            if i != 0:
                flag(i, tok, "BOS not at sequence start")
            continue
        if t is TokenType.EOS:
            if expect_ic or expect_duration:
                flag(i, tok, "EOS inside a note group")
            ended = True
            continue
        if t is TokenType.PAD:
            if not ended:
                flag(i, tok, "PAD before EOS")
            continue
        if t is TokenType.MASK:
            flag(i, tok, "MASK is not part of the grammar")
            continue

        if expect_ic is not None:
            if t is not expect_ic:
                flag(i, tok, f"{expect_ic.value} must immediately follow its octave token")
                expect_ic = None
            else:
                expect_ic = None
                expect_duration = True
                if cfg is not None and tok.value is not None and not 0 <= tok.value <= 11:
                    flag(i, tok, "interval class outside 0..11")
                continue
        elif t in (TokenType.VIC, TokenType.HIC):
            flag(i, tok, f"{t.value} without a preceding octave token")
            continue

        if t is TokenType.DURATION:
            if not expect_duration:
                flag(i, tok, "Duration without a pitch-payload group")
            expect_duration = False
            if cfg is not None and tok.value > cfg.grid.max_duration:
                flag(i, tok, f"Duration {tok.value} beyond grid maximum")
            continue
        if expect_duration:
            flag(i, tok, "pitch-payload group not followed by Duration")
            expect_duration = False

        if t is TokenType.BAR:
            bars_seen += 1
            position = None
        elif t is TokenType.POSITION:
            if bars_seen == 0:
                flag(i, tok, "Position before any Bar")
            if position is not None and tok.value <= position:
                flag(i, tok, "Position not strictly increasing within bar")
            position = tok.value
            if cfg is not None and tok.value >= cfg.grid.max_positions_per_bar:
                flag(i, tok, f"Position {tok.value} beyond grid maximum")
        elif t in _PLAIN_PAYLOADS or t in _OCT_PAYLOADS:
            if position is None:
                flag(i, tok, f"{t.value} without a preceding Position")
            if cfg is not None:
                if t in (TokenType.VPI, TokenType.HPI) and abs(tok.value) > cfg.clamp:
                    flag(i, tok, f"{t.value} {tok.value:+d} beyond clamp {cfg.clamp}")
                if t in _OCT_PAYLOADS and not oct_lo <= tok.value <= oct_hi:
                    flag(i, tok, f"{t.value} {tok.value:+d} outside octave range")
            if t in _OCT_PAYLOADS:
                expect_ic = _OCT_PAYLOADS[t]
            else:
                expect_duration = True

    if expect_ic is not None:
        violations.append(GrammarViolation(len(tokens), "", "sequence ends inside an octave pair"))
    if expect_duration:
        violations.append(GrammarViolation(len(tokens), "", "sequence ends without final Duration"))
    return violations
