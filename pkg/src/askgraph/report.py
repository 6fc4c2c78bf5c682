"""Benchmark report rendering: JSON + CSV + figures.

The bench command writes the evaluation report as JSON, a per-question CSV,
and two matplotlib figures (metric bars per question, mean phase timings)
into one output directory.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

PHASES = ("qu", "linking", "execution_filtration")
PHASE_LABELS = {"qu": "QU", "linking": "Linking", "execution_filtration": "E&F"}


def _shorten(question: str, width: int = 28) -> str:
    return question if len(question) <= width else question[: width - 1] + "…"


def write_metrics_figure(report: dict, path: Path) -> None:
    entries = report["per_question"]
    labels = [_shorten(e["question"]) for e in entries]
    x = range(len(entries))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(6.0, 1.6 * len(entries)), 3.6))
    ax.bar([i - width for i in x], [e["p"] for e in entries], width, label="P")
    ax.bar(list(x), [e["r"] for e in entries], width, label="R")
    ax.bar([i + width for i in x], [e["f1"] for e in entries], width, label="F1")
    ax.axhline(report["macro"]["f1"], linestyle="--", linewidth=1, color="gray")
    ax.text(
        len(entries) - 0.5,
        report["macro"]["f1"] + 0.02,
        f"macro F1 = {report['macro']['f1']:.3f}",
        ha="right",
        fontsize=8,
        color="gray",
    )
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=7)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("score")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_timings_figure(report: dict, path: Path) -> None:
    timings = report.get("mean_timings", {})
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    bottom = 0.0
    for phase in PHASES:
        value = timings.get(phase, 0.0)
        ax.bar(["mean per question"], [value], bottom=bottom, label=PHASE_LABELS[phase])
        bottom += value
    ax.set_ylabel("seconds")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report(report: dict, out_dir: str) -> dict[str, str]:
    """Write report.json, per_question.csv and figures; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out / "report.json",
        "csv": out / "per_question.csv",
        "metrics_figure": out / "metrics.png",
        "timings_figure": out / "timings.png",
    }
    paths["report"].write_text(json.dumps(report, indent=2), encoding="utf-8")
    with open(paths["csv"], "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["question", "precision", "recall", "f1", "predicted", "error"])
        for entry in report["per_question"]:
            writer.writerow(
                [
                    entry["question"],
                    f"{entry['p']:.6f}",
                    f"{entry['r']:.6f}",
                    f"{entry['f1']:.6f}",
                    "|".join(entry.get("predicted", [])),
                    entry.get("error", ""),
                ]
            )
    write_metrics_figure(report, paths["metrics_figure"])
    write_timings_figure(report, paths["timings_figure"])
    return {name: str(path) for name, path in paths.items()}
