"""Figure rendering for training traces and evaluation reports."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Dict, Mapping, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import COMPONENT_LABELS, EvalReport
from .taxonomy import COMPONENT_NAMES

_CLASS_TICKS = {
    "interaction": ("000", "100", "101", "110", "111"),
    "recurrence": ("0", "1"),
    "prismatic": ("00", "01", "11"),
    "revolute": ("00", "01", "11"),
    "passive": ("0", "1"),
}


def save_loss_figure(traces: Mapping[str, Sequence[float]],
                     path: Union[str, Path], title: str = "Training loss") -> None:
    """Line plot of per-epoch mean losses, one series per modality."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name, values in traces.items():
        ax.plot(range(len(values)), values, label=name)
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean loss")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_loss_csv(traces: Mapping[str, Sequence[float]],
                   path: Union[str, Path]) -> None:
    """Comma-delimited trace: epoch index plus one column per modality."""
    names = list(traces)
    length = max((len(traces[name]) for name in names), default=0)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["epoch"] + names)
        for epoch in range(length):
            row = [epoch]
            for name in names:
                values = traces[name]
                row.append(values[epoch] if epoch < len(values) else "")
            writer.writerow(row)


def save_confusion_figure(report: EvalReport, path: Union[str, Path],
                          title: str = "") -> None:
    """Heatmaps of the five confusion matrices, rows truth, columns predicted."""
    fig, axes = plt.subplots(1, len(COMPONENT_NAMES), figsize=(16, 3.4))
    for ax, name in zip(axes, COMPONENT_NAMES):
        matrix = np.asarray(report.confusions[name])
        ax.imshow(matrix, cmap="Blues")
        ticks = _CLASS_TICKS[name]
        ax.set_xticks(range(len(ticks)), ticks, fontsize=8)
        ax.set_yticks(range(len(ticks)), ticks, fontsize=8)
        peak = matrix.max() if matrix.size else 0
        for r in range(matrix.shape[0]):
            for c in range(matrix.shape[1]):
                color = "white" if peak and matrix[r, c] > peak / 2 else "black"
                ax.text(c, r, str(matrix[r, c]), ha="center", va="center",
                        color=color, fontsize=7)
        ax.set_title(COMPONENT_LABELS[name], fontsize=9)
        ax.set_xlabel("predicted", fontsize=8)
    axes[0].set_ylabel("truth", fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
