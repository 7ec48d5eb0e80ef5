// Bindings for ML data pipelines over the intervaltok CLI.
// No tokenization logic lives here: every call shells out to the CLI, so
// outputs are string/byte-identical to the documented JSONL/JSON formats.

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

/** Grid half of a strategy config; keys match the config JSON. */
export interface GridMapping {
  subdivisions_per_beat?: number;
  max_duration_bars?: number;
}

/** Strategy config mapping; keys match the config JSON field names. */
export interface StrategyMapping {
  reference_kind?: "melody" | "skyline" | "bottomline" | "external" | null;
  i_ref?: "absolute" | "hpi";
  i_nonref?: "absolute" | "vpi";
  interval_form?: "plain" | "oct-class";
  clamp?: number;
  grid?: GridMapping;
}

/** Per-call options that are not part of the strategy config. */
export interface CallOptions {
  /** Track index of the melody; required for melody references. */
  melodyTrack?: number;
  /** Path to an external reference JSON file; required for external references. */
  referenceFile?: string;
  /** Time signatures in grid units for detokenization; defaults to 4/4. */
  timeSignatures?: Array<[number, number, number]>;
  /** CLI executable; defaults to $INTERVALTOK_BIN or "intervaltok". */
  bin?: string;
}

/** An error reported by the primary implementation, carrying its error name. */
export class PrimaryError extends Error {
  constructor(name: string, message: string) {
    super(message);
    this.name = name;
  }
}

function strategyName(cfg: StrategyMapping): string {
  if (cfg.i_ref === "hpi") return "hpi-vpi";
  if (cfg.i_nonref === "vpi") return "abs-vpi";
  return "remi-abs";
}

function strategyFlags(cfg: StrategyMapping, options: CallOptions): string[] {
  const flags = ["--strategy", strategyName(cfg)];
  if (strategyName(cfg) !== "remi-abs" && cfg.reference_kind) {
    flags.push("--reference", cfg.reference_kind);
  }
  if (cfg.interval_form) flags.push("--interval-form", cfg.interval_form);
  if (cfg.clamp !== undefined) flags.push("--clamp", String(cfg.clamp));
  if (cfg.grid?.subdivisions_per_beat !== undefined) {
    flags.push("--subdiv", String(cfg.grid.subdivisions_per_beat));
  }
  if (cfg.grid?.max_duration_bars !== undefined) {
    flags.push("--max-bars", String(cfg.grid.max_duration_bars));
  }
  if (options.melodyTrack !== undefined) {
    flags.push("--melody-track", String(options.melodyTrack));
  }
  if (options.referenceFile !== undefined) {
    flags.push("--reference-file", options.referenceFile);
  }
  return flags;
}

const ERROR_LINE = /^error: .*?: ([A-Za-z]+): (.*)$/m;

function runCli(args: string[], options: CallOptions): void {
  const bin = options.bin ?? process.env.INTERVALTOK_BIN ?? "intervaltok";
  const result = spawnSync(bin, args, { encoding: "utf8" });
  if (result.error) {
    throw new PrimaryError("SpawnError", `${bin}: ${result.error.message}`);
  }
  if (result.status === 0) return;
  const match = ERROR_LINE.exec(result.stderr ?? "");
  if (match) {
    throw new PrimaryError(match[1], match[2]);
  }
  throw new PrimaryError(
    result.status === 2 ? "UsageError" : "CliError",
    (result.stderr || result.stdout || "").trim(),
  );
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "intervaltok-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}

/**
 * Tokenize one MIDI file; returns the canonical token strings, identical
 * to the "tokens" field of the CLI's JSONL record for the same inputs.
 */
export function bindTokenize(
  midiPath: string,
  cfg: StrategyMapping,
  options: CallOptions = {},
): string[] {
  return withTempDir((dir) => {
    const out = path.join(dir, "tokens.jsonl");
    runCli(["tokenize", midiPath, ...strategyFlags(cfg, options), "--out", out], options);
    const record = JSON.parse(fs.readFileSync(out, "utf8").split("\n")[0]);
    return record.tokens as string[];
  });
}

/**
 * Rebuild a Standard MIDI File from canonical token strings; returns the
 * SMF bytes the CLI would write. The anchor supplies a dropped first
 * reference pitch under horizontal-interval strategies.
 */
export function bindDetokenize(
  tokens: string[],
  cfg: StrategyMapping,
  anchor: number = 60,
  options: CallOptions = {},
): Buffer {
  return withTempDir((dir) => {
    const tokenFile = path.join(dir, "tokens.jsonl");
    const record = {
      path: "piece.mid",
      tokens,
      time_signatures: options.timeSignatures ?? [[0, 4, 4]],
    };
    fs.writeFileSync(tokenFile, JSON.stringify(record) + "\n");
    const outDir = path.join(dir, "midi");
    runCli(
      [
        "detokenize", tokenFile, ...strategyFlags(cfg, options),
        "--anchor", String(anchor), "--out", outDir,
      ],
      options,
    );
    return fs.readFileSync(path.join(outDir, "piece.mid"));
  });
}

/**
 * Build the closed vocabulary for a strategy; returns the token -> id
 * mapping, with ids exactly as in the CLI's vocab JSON.
 */
export function bindBuildVocab(
  cfg: StrategyMapping,
  options: CallOptions = {},
): Record<string, number> {
  return withTempDir((dir) => {
    const out = path.join(dir, "vocab.json");
    runCli(["vocab", ...strategyFlags(cfg, options), "--out", out], options);
    const parsed = JSON.parse(fs.readFileSync(out, "utf8"));
    const mapping: Record<string, number> = {};
    (parsed.tokens as string[]).forEach((token, id) => {
      mapping[token] = id;
    });
    return mapping;
  });
}
