"""Rendering of histogram reports: delimited text plus matplotlib figures."""
from __future__ import annotations

import csv
import re
from pathlib import Path

from .labels import HistogramReport

_INTERVAL_NAMES = {
    0: "P1",
    1: "2m",
    2: "2M",
    3: "3m",
    4: "3M",
    5: "P4",
    6: "TT",
    7: "P5",
    8: "6m",
    9: "6M",
    10: "7m",
    11: "7M",
}


def interval_name(interval: int) -> str:
    """Musical name of a semitone interval; compounds get a (+n) octave mark."""
    if interval < 0:
        return "-" + interval_name(-interval)
    octaves, cls = divmod(interval, 12)
    if cls == 0 and octaves > 0:
        name, extra = "P8", octaves - 1
    else:
        name, extra = _INTERVAL_NAMES[cls], octaves
    return f"{name}(+{extra})" if extra > 0 else name


def write_histogram_csv(report: HistogramReport, path):
    """One row per (label, interval): counts with their false-positive share."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["label", "interval", "interval_name", "count", "false_positives"])
        for label in sorted(report.counts):
            for interval in sorted(report.counts[label]):
                bin_ = report.counts[label][interval]
                writer.writerow(
                    [label, interval, interval_name(interval), bin_.count, bin_.false_positives]
                )


def _safe_name(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label) or "unlabeled"


def render_histogram_figures(report: HistogramReport, out_dir) -> list[Path]:
    """One PNG per label value: stacked bars, false positives hatched."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for label in sorted(report.counts):
        bucket = report.counts[label]
        intervals = sorted(bucket)
        true_pos = [bucket[i].count - bucket[i].false_positives for i in intervals]
        false_pos = [bucket[i].false_positives for i in intervals]
        names = [interval_name(i) for i in intervals]

        fig, ax = plt.subplots(figsize=(max(4.0, 0.35 * len(intervals) + 1.5), 3.0))
        x = range(len(intervals))
        ax.bar(x, true_pos, color="#3274a1", label="true positives")
        ax.bar(
            x,
            false_pos,
            bottom=true_pos,
            color="#9fb8cc",
            hatch="///",
            label="false positives",
        )
        ax.set_xticks(list(x))
        ax.set_xticklabels(names, rotation=90, fontsize=7)
        ax.set_ylabel("Count")
        ax.set_title(f"Vertical intervals: {label}")
        if any(false_pos):
            ax.legend(fontsize=7)
        fig.tight_layout()
        path = out_dir / f"histogram_{_safe_name(label)}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
