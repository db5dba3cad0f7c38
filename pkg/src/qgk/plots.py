"""Figure rendering for the report-producing CLI paths.

matplotlib is imported lazily so library users who never render figures do
not pay for it.  Figures are written to files; nothing is shown interactively.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np

from .quantum import BornDistribution, ShotCounts

__all__ = ["save_distribution_figure", "save_difference_figure"]

_DPI = 120


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def save_distribution_figure(
    path,
    ideal: BornDistribution,
    sim: ShotCounts,
    hw: Optional[ShotCounts] = None,
    title: str = "Outcome distributions",
) -> Path:
    """Grouped bar chart of exact vs sampled outcome probabilities."""
    plt = _pyplot()
    n = ideal.n_qubits
    labels = [format(z, f"0{n}b") for z in range(2**n)]
    series = [("exact", ideal.probabilities), ("simulator shots", sim.to_distribution())]
    if hw is not None:
        series.append(("hardware proxy", hw.to_distribution()))
    x = np.arange(len(labels))
    width = 0.8 / len(series)
    fig, ax = plt.subplots(figsize=(max(6.0, 0.45 * len(labels)), 3.5))
    for k, (name, probs) in enumerate(series):
        ax.bar(x + (k - (len(series) - 1) / 2) * width, probs, width, label=name)
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=90 if n > 3 else 0, fontsize=8)
    ax.set_xlabel("measured bitstring")
    ax.set_ylabel("probability")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=_DPI)
    plt.close(fig)
    return out


def save_difference_figure(path, a: np.ndarray, b: np.ndarray, title: str = "Absolute difference") -> Path:
    """Heatmap of per-pixel mean absolute channel difference between a and b."""
    plt = _pyplot()
    diff = np.mean(
        np.abs(a.astype(np.float64) - b.astype(np.float64)), axis=2
    )
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(diff, cmap="magma", interpolation="nearest")
    fig.colorbar(im, ax=ax, label="mean |delta| per channel")
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=_DPI)
    plt.close(fig)
    return out
