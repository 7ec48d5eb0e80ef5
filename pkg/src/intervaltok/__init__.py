"""Symbolic music tokenization with absolute or interval-based pitch encodings."""

from .config import IntervalForm, NonRefEncoding, RefEncoding, StrategyConfig
from .encoding import Diagnostics, EncodedEvents, EncodedNote, PayloadKind
from .errors import (
    CodecError,
    ConfigMismatchError,
    DanglingNoteWarning,
    EmptyInputError,
    GrammarError,
    IntervaltokError,
    InternalError,
    MonophonyError,
    ParseError,
    RangeError,
)
from .intervalize import (
    Partition,
    Segment,
    detokenize,
    interval_class_decompose,
    intervalize,
    partition,
    tokenize,
)
from .labels import (
    IGNORE_LABEL,
    AlignedLabels,
    HistogramReport,
    LabelRow,
    align_labels,
    histogram,
    load_label_file,
)
from .reference import (
    ReferenceKind,
    ReferenceStream,
    extract_bottomline,
    extract_melody,
    extract_skyline,
    validate_external_reference,
)
from .remi import (
    GrammarViolation,
    Token,
    TokenSequence,
    TokenType,
    emit,
    parse_token,
    validate,
)
from .score import (
    BarLayout,
    GridSpec,
    NoteEvent,
    QuantizedScore,
    Score,
    quantize,
    to_ticks,
    transpose,
)
from .smf import parse_smf, write_smf
from .vocab import Vocabulary, build_vocab, decode_ids, encode_ids

__version__ = "0.1.0"

__all__ = [
    "AlignedLabels",
    "BarLayout",
    "CodecError",
    "ConfigMismatchError",
    "DanglingNoteWarning",
    "Diagnostics",
    "EmptyInputError",
    "EncodedEvents",
    "EncodedNote",
    "GrammarError",
    "GrammarViolation",
    "GridSpec",
    "HistogramReport",
    "IGNORE_LABEL",
    "IntervalForm",
    "IntervaltokError",
    "InternalError",
    "LabelRow",
    "MonophonyError",
    "NonRefEncoding",
    "NoteEvent",
    "ParseError",
    "Partition",
    "PayloadKind",
    "QuantizedScore",
    "RangeError",
    "RefEncoding",
    "ReferenceKind",
    "ReferenceStream",
    "Score",
    "Segment",
    "StrategyConfig",
    "Token",
    "TokenSequence",
    "TokenType",
    "Vocabulary",
    "align_labels",
    "build_vocab",
    "decode_ids",
    "detokenize",
    "emit",
    "encode_ids",
    "extract_bottomline",
    "extract_melody",
    "extract_skyline",
    "histogram",
    "interval_class_decompose",
    "intervalize",
    "load_label_file",
    "parse_smf",
    "parse_token",
    "partition",
    "quantize",
    "to_ticks",
    "tokenize",
    "transpose",
    "validate",
    "validate_external_reference",
    "write_smf",
]
