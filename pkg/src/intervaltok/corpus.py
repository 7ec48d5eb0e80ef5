"""Per-piece corpus operations behind the CLI.

Workers process pieces independently and results are collected in input
order, so output is byte-identical no matter the worker count. Every
function here must stay module-level and take picklable arguments.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .config import StrategyConfig
from .errors import IntervaltokError
from .intervalize import detokenize, extract_reference, tokenize
from .reference import ReferenceKind, ReferenceStream, validate_external_reference
from .score import NoteEvent, QuantizedScore, quantize
from .smf import parse_smf
from .vocab import build_vocab, encode_ids


@dataclass(frozen=True)
class PieceSpec:
    """Everything a worker needs to process one piece."""

    path: str
    cfg_json: str
    melody_track: int | None = None
    external_events: tuple[tuple[int, int, int], ...] | None = None
    anchor_pitch: int = 60


@lru_cache(maxsize=8)
def _cfg(cfg_json: str) -> StrategyConfig:
    return StrategyConfig.from_json(cfg_json)


@lru_cache(maxsize=8)
def _vocab(cfg_json: str):
    return build_vocab(_cfg(cfg_json))


def load_external_events(path) -> tuple[tuple[int, int, int], ...]:
    """Read an external reference file: a JSON list of {pitch, onset, duration}."""
    with open(path, encoding="utf-8") as f:
        rows = json.load(f)
    return tuple((int(r["pitch"]), int(r["onset"]), int(r["duration"])) for r in rows)


def _external_ref(spec: PieceSpec, q: QuantizedScore) -> ReferenceStream | None:
    if spec.external_events is None:
        return None
    events = [NoteEvent(p, o, d, 0) for p, o, d in spec.external_events]
    return validate_external_reference(events, q)


def _quantized(spec: PieceSpec, cfg: StrategyConfig) -> QuantizedScore:
    with open(spec.path, "rb") as f:
        score = parse_smf(f.read())
    return quantize(score, cfg.grid)


def _error(spec: PieceSpec, err: Exception) -> dict:
    return {
        "status": "error",
        "path": spec.path,
        "error": type(err).__name__,
        "message": str(err),
    }


def tokenize_piece(spec: PieceSpec) -> dict:
    """Tokenize one file; returns an ok record or an error record."""
    try:
        cfg = _cfg(spec.cfg_json)
        q = _quantized(spec, cfg)
        seq = tokenize(q, cfg, spec.melody_track, _external_ref(spec, q))
        ids = encode_ids(seq, _vocab(spec.cfg_json))
        return {
            "status": "ok",
            "record": {
                "path": spec.path,
                "fingerprint": cfg.fingerprint,
                "tokens": seq.to_strings(),
                "ids": ids,
                "time_signatures": [list(ts) for ts in q.time_signatures],
            },
        }
    except (IntervaltokError, ValueError, OSError) as err:
        return _error(spec, err)


def audit_piece(spec: PieceSpec) -> dict:
    """Tokenize, detokenize and compare one file; returns an audit row.

    Notes compare as (pitch, onset, duration) multisets; track identity is
    documented as unrecoverable. Under a horizontal reference encoding the
    first reference note is expected loss and the anchor is taken from the
    true first reference pitch. For track-independent references the token
    stream of the decoded score is compared too.
    """
    try:
        cfg = _cfg(spec.cfg_json)
        q = _quantized(spec, cfg)
        external = _external_ref(spec, q)
        seq = tokenize(q, cfg, spec.melody_track, external)

        expected = sorted((n.pitch, n.onset, n.duration) for n in q.notes)
        expected_loss = ""
        anchor = spec.anchor_pitch
        if cfg.is_plain_absolute:
            pass
        else:
            ref = extract_reference(q, cfg, spec.melody_track, external)
            if external is not None:
                expected += sorted((e.pitch, e.onset, e.duration) for e in ref.events)
                expected.sort()
            if cfg.uses_horizontal:
                first = ref.events[0]
                anchor = first.pitch
                expected.remove((first.pitch, first.onset, first.duration))
                expected_loss = "first reference note dropped"
        decoded = detokenize(seq, cfg, anchor, q.time_signatures)
        actual = sorted((n.pitch, n.onset, n.duration) for n in decoded.notes)

        divergence = ""
        if actual != expected:
            for a, b in zip(expected, actual):
                if a != b:
                    divergence = f"expected {a}, got {b}"
                    break
            else:
                divergence = f"note count {len(actual)} != {len(expected)}"
        elif cfg.reference_kind in (None, ReferenceKind.SKYLINE, ReferenceKind.BOTTOMLINE):
            if not cfg.uses_horizontal:
                again = tokenize(decoded, cfg, None, None)
                if again.tokens != seq.tokens:
                    for i, (a, b) in enumerate(zip(seq.tokens, again.tokens)):
                        if a != b:
                            divergence = f"token {i}: {a} re-emitted as {b}"
                            break
                    else:
                        divergence = "token count changed on re-tokenization"
        return {
            "status": "ok" if not divergence else "fail",
            "path": spec.path,
            "notes_in": len(q.notes),
            "notes_out": len(decoded.notes),
            "expected_loss": expected_loss,
            "first_divergence": divergence,
        }
    except (IntervaltokError, ValueError, OSError) as err:
        return _error(spec, err)


def extract_reference_piece(spec: PieceSpec) -> dict:
    """Dump the reference stream chosen for one file."""
    try:
        cfg = _cfg(spec.cfg_json)
        q = _quantized(spec, cfg)
        ref = extract_reference(q, cfg, spec.melody_track, _external_ref(spec, q))
        return {
            "status": "ok",
            "record": {
                "path": spec.path,
                "kind": ref.kind.value,
                "events": [
                    {"pitch": e.pitch, "onset": e.onset, "duration": e.duration, "track": e.track}
                    for e in ref.events
                ],
            },
        }
    except (IntervaltokError, ValueError, OSError) as err:
        return _error(spec, err)


def run_ordered(worker, specs, workers: int = 1) -> list[dict]:
    """Run a worker over specs, returning results in spec order."""
    specs = list(specs)
    if workers <= 1 or len(specs) <= 1:
        return [worker(spec) for spec in specs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, specs))


def dump_record(record: dict) -> str:
    """Canonical JSONL line for a record; key order fixed for byte-stable output."""
    return json.dumps(record, sort_keys=True, separators=(",", ":"))
