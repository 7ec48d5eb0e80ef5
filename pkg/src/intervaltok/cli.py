"""Command-line front end for corpus tokenization and analysis.

Exit codes: 0 on success, 1 when any per-file error occurred, 2 on usage
errors.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import StrategyConfig
from .corpus import (
    PieceSpec,
    audit_piece,
    dump_record,
    extract_reference_piece,
    load_external_events,
    run_ordered,
    tokenize_piece,
)
from .errors import IntervaltokError
from .intervalize import detokenize
from .labels import align_labels, histogram, load_label_file, rows_for_piece
from .reference import ReferenceKind
from .remi import TokenSequence
from .report import render_histogram_figures, write_histogram_csv
from .score import GridSpec, to_ticks
from .smf import write_smf
from .vocab import build_vocab


@click.group()
def main():
    """Tokenize symbolic music with absolute or interval-based pitch encodings."""


def strategy_options(f):
    decorators = [
        click.option(
            "--strategy",
            type=click.Choice(["remi-abs", "abs-vpi", "hpi-vpi"]),
            default="remi-abs",
            show_default=True,
            help="Pitch encoding of reference / non-reference notes.",
        ),
        click.option(
            "--reference",
            type=click.Choice(["melody", "skyline", "bottomline", "external"]),
            default="skyline",
            show_default=True,
            help="Reference stream for interval strategies.",
        ),
        click.option("--melody-track", type=int, default=None, help="Track index of the melody."),
        click.option(
            "--reference-file",
            type=click.Path(exists=True, dir_okay=False),
            default=None,
            help="JSON list of {pitch, onset, duration} in grid units.",
        ),
        click.option(
            "--interval-form",
            type=click.Choice(["plain", "oct-class"]),
            default="plain",
            show_default=True,
            help="Interval tokens as plain values or octave+class pairs.",
        ),
        click.option("--clamp", type=int, default=48, show_default=True,
                      help="Interval saturation bound in semitones."),
        click.option("--subdiv", type=int, default=4, show_default=True,
                      help="Grid subdivisions per quarter note."),
        click.option("--max-bars", type=int, default=4, show_default=True,
                      help="Duration clamp in bars."),
    ]
    for d in reversed(decorators):
        f = d(f)
    return f


def build_config(strategy, reference, interval_form, clamp, subdiv, max_bars=4) -> StrategyConfig:
    try:
        return StrategyConfig.from_strategy(
            strategy,
            reference=reference,
            interval_form=interval_form,
            clamp=clamp,
            grid=GridSpec(subdivisions_per_beat=subdiv, max_duration_bars=max_bars),
        )
    except ValueError as err:
        raise click.UsageError(str(err))


def check_reference_flags(cfg: StrategyConfig, melody_track, reference_file):
    if cfg.reference_kind is ReferenceKind.MELODY and melody_track is None:
        raise click.UsageError("--melody-track is required with --reference melody")
    if cfg.reference_kind is ReferenceKind.EXTERNAL and reference_file is None:
        raise click.UsageError("--reference-file is required with --reference external")


def make_specs(inputs, cfg, melody_track, reference_file, anchor=60) -> list[PieceSpec]:
    external = load_external_events(reference_file) if reference_file else None
    return [
        PieceSpec(
            path=str(p),
            cfg_json=cfg.to_json(),
            melody_track=melody_track if cfg.reference_kind is ReferenceKind.MELODY else None,
            external_events=external if cfg.reference_kind is ReferenceKind.EXTERNAL else None,
            anchor_pitch=anchor,
        )
        for p in inputs
    ]


def report_errors(results) -> int:
    errors = [r for r in results if r["status"] == "error"]
    for r in errors:
        click.echo(f"error: {r['path']}: {r['error']}: {r['message']}", err=True)
    return len(errors)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(dump_record(record))
            f.write("\n")


@main.command("tokenize")
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@strategy_options
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Output JSONL file.")
def cmd_tokenize(inputs, strategy, reference, melody_track, reference_file,
                 interval_form, clamp, subdiv, max_bars, workers, out):
    """Tokenize MIDI files into one JSONL record per piece, in input order."""
    cfg = build_config(strategy, reference, interval_form, clamp, subdiv, max_bars)
    check_reference_flags(cfg, melody_track, reference_file)
    specs = make_specs(inputs, cfg, melody_track, reference_file)
    results = run_ordered(tokenize_piece, specs, workers)
    write_jsonl(out, [r["record"] for r in results if r["status"] == "ok"])
    if report_errors(results):
        sys.exit(1)


@main.command("detokenize")
@click.argument("token_file", type=click.Path(exists=True, dir_okay=False))
@strategy_options
@click.option("--anchor", type=int, default=60, show_default=True,
              help="Pitch standing in for a dropped first reference note.")
@click.option("--out", required=True, type=click.Path(file_okay=False), help="Output directory.")
def cmd_detokenize(token_file, strategy, reference, melody_track, reference_file,
                   interval_form, clamp, subdiv, max_bars, anchor, out):
    """Rebuild MIDI files from a tokenize JSONL file."""
    cfg = build_config(strategy, reference, interval_form, clamp, subdiv, max_bars)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    seen: dict[str, int] = {}
    with open(token_file, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            try:
                seq = TokenSequence.from_strings(
                    record["tokens"], record.get("fingerprint", "")
                )
                sigs = tuple(tuple(ts) for ts in record.get("time_signatures", [[0, 4, 4]]))
                q = detokenize(seq, cfg, anchor, sigs)
            except (IntervaltokError, ValueError) as err:
                click.echo(
                    f"error: {record.get('path', f'line {line_no}')}: "
                    f"{type(err).__name__}: {err}",
                    err=True,
                )
                failures += 1
                continue
            stem = Path(record.get("path", f"piece_{line_no}")).stem
            count = seen.get(stem, 0)
            seen[stem] = count + 1
            name = f"{stem}.mid" if count == 0 else f"{stem}_{count}.mid"
            (out_dir / name).write_bytes(write_smf(to_ticks(q)))
    if failures:
        sys.exit(1)


@main.command("vocab")
@strategy_options
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Output JSON file.")
def cmd_vocab(strategy, reference, melody_track, reference_file, interval_form,
              clamp, subdiv, max_bars, out):
    """Build the closed vocabulary for a strategy and write it as JSON."""
    cfg = build_config(strategy, reference, interval_form, clamp, subdiv, max_bars)
    vocab = build_vocab(cfg)
    vocab.save(out)
    click.echo(f"{len(vocab)} tokens -> {out}")


@main.command("roundtrip")
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@strategy_options
@click.option("--anchor", type=int, default=60, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Optional TSV report path.")
def cmd_roundtrip(inputs, strategy, reference, melody_track, reference_file,
                  interval_form, clamp, subdiv, max_bars, anchor, out):
    """Audit tokenize/detokenize inversion over MIDI files."""
    cfg = build_config(strategy, reference, interval_form, clamp, subdiv, max_bars)
    check_reference_flags(cfg, melody_track, reference_file)
    specs = make_specs(inputs, cfg, melody_track, reference_file, anchor)
    results = run_ordered(audit_piece, specs)
    rows = []
    for r in results:
        if r["status"] == "error":
            continue
        status = "pass" if r["status"] == "ok" else "fail"
        note = r["expected_loss"] or r["first_divergence"] or "exact"
        click.echo(f"{status}\t{r['path']}\t{note}")
        rows.append(r)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write("path\tstatus\tnotes_in\tnotes_out\texpected_loss\tfirst_divergence\n")
            for r in rows:
                status = "pass" if r["status"] == "ok" else "fail"
                f.write(
                    f"{r['path']}\t{status}\t{r['notes_in']}\t{r['notes_out']}\t"
                    f"{r['expected_loss']}\t{r['first_divergence']}\n"
                )
    n_errors = report_errors(results)
    n_fail = sum(1 for r in results if r["status"] == "fail")
    click.echo(f"{len(results) - n_fail - n_errors} pass, {n_fail} fail, {n_errors} error")
    if n_errors or n_fail:
        sys.exit(1)


def _aligned_for_piece(spec, label_table, names, cfg):
    """Tokenize one piece and align its label rows; returns (record, aligned, seq)."""
    result = tokenize_piece(spec)
    if result["status"] == "error":
        return result, None, None
    record = result["record"]
    seq = TokenSequence.from_strings(record["tokens"], record["fingerprint"])
    sigs = tuple(tuple(ts) for ts in record["time_signatures"])
    aligned = align_labels(
        seq,
        rows_for_piece(label_table, spec.path),
        cfg,
        anchor_pitch=spec.anchor_pitch,
        time_signatures=sigs,
        label_names=names,
    )
    return result, aligned, seq


def _label_names(*tables) -> tuple[str, ...]:
    names = set()
    for table in tables:
        for rows in table.values():
            names.update(r.label for r in rows)
    return tuple(sorted(names))


@main.command("align-labels")
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@strategy_options
@click.option("--labels", "labels_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON label file: piece key -> rows of {onset, pitch, label}.")
@click.option("--anchor", type=int, default=60, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Output JSONL file.")
def cmd_align_labels(inputs, strategy, reference, melody_track, reference_file,
                     interval_form, clamp, subdiv, max_bars, labels_path, anchor, out):
    """Project note-level labels onto tokens (-1 marks tokens to ignore)."""
    cfg = build_config(strategy, reference, interval_form, clamp, subdiv, max_bars)
    check_reference_flags(cfg, melody_track, reference_file)
    label_table = load_label_file(labels_path)
    names = _label_names(label_table)
    records = []
    errors = 0
    for spec in make_specs(inputs, cfg, melody_track, reference_file, anchor):
        result, aligned, _ = _aligned_for_piece(spec, label_table, names, cfg)
        if aligned is None:
            click.echo(
                f"error: {result['path']}: {result['error']}: {result['message']}", err=True
            )
            errors += 1
            continue
        if aligned.unmatched_rows:
            click.echo(
                f"warning: {spec.path}: {aligned.unmatched_rows} label row(s) "
                f"matched no note",
                err=True,
            )
        records.append(
            {
                "path": spec.path,
                "fingerprint": cfg.fingerprint,
                "label_ids": list(aligned.label_ids),
                "label_names": list(names),
                "unmatched_rows": aligned.unmatched_rows,
            }
        )
    write_jsonl(out, records)
    if errors:
        sys.exit(1)


@main.group("stats")
def stats():
    """Corpus statistics reports."""


@stats.command("histogram")
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@strategy_options
@click.option("--labels", "labels_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--predicted", "predicted_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Second label file with predicted labels; bars split into "
                   "true/false positives.")
@click.option("--anchor", type=int, default=60, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False),
              help="Output directory for histogram.csv and figures.")
def cmd_stats_histogram(inputs, strategy, reference, melody_track, reference_file,
                        interval_form, clamp, subdiv, max_bars, labels_path, predicted_path,
                        anchor, out):
    """Histogram of vertical-interval tokens grouped by label."""
    cfg = build_config(strategy, reference, interval_form, clamp, subdiv, max_bars)
    check_reference_flags(cfg, melody_track, reference_file)
    if not cfg.uses_vertical:
        raise click.UsageError("histograms need a strategy with vertical intervals")
    label_table = load_label_file(labels_path)
    predicted_table = load_label_file(predicted_path) if predicted_path else None
    names = _label_names(label_table, *( [predicted_table] if predicted_table else [] ))

    from .labels import HistogramReport

    report = HistogramReport()
    errors = 0
    for spec in make_specs(inputs, cfg, melody_track, reference_file, anchor):
        result, aligned, seq = _aligned_for_piece(spec, label_table, names, cfg)
        if aligned is None:
            click.echo(
                f"error: {result['path']}: {result['error']}: {result['message']}", err=True
            )
            errors += 1
            continue
        sigs = tuple(tuple(ts) for ts in result["record"]["time_signatures"])
        predicted = None
        if predicted_table is not None:
            predicted = align_labels(
                seq,
                rows_for_piece(predicted_table, spec.path),
                cfg,
                anchor_pitch=anchor,
                time_signatures=sigs,
                label_names=names,
            )
        report.merge(
            histogram(seq, aligned, predicted, cfg, anchor_pitch=anchor, time_signatures=sigs)
        )
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_histogram_csv(report, out_dir / "histogram.csv")
    figures = render_histogram_figures(report, out_dir)
    click.echo(f"{report.total()} vertical-interval tokens counted")
    click.echo(f"wrote {out_dir / 'histogram.csv'} and {len(figures)} figure(s)")
    if errors:
        sys.exit(1)


@main.command("extract-reference")
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@strategy_options
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Output JSONL file.")
def cmd_extract_reference(inputs, strategy, reference, melody_track, reference_file,
                          interval_form, clamp, subdiv, max_bars, out):
    """Dump the reference stream chosen for each input (debug aid)."""
    cfg = build_config("abs-vpi" if strategy == "remi-abs" else strategy,
                       reference, interval_form, clamp, subdiv, max_bars)
    check_reference_flags(cfg, melody_track, reference_file)
    specs = make_specs(inputs, cfg, melody_track, reference_file)
    results = run_ordered(extract_reference_piece, specs)
    write_jsonl(out, [r["record"] for r in results if r["status"] == "ok"])
    if report_errors(results):
        sys.exit(1)
