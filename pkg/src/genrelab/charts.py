"""Matplotlib renderings of reports and evaluation grids.

The CLI report path writes these figures next to its delimited output:
one pie chart per algorithm plus the consensus pie, and a Green/Red cell
grid for evaluation runs.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation import GREEN, EvaluationGrid
from .genres import GENRES
from .models import MODEL_NAMES

MODEL_TITLES = {
    "knn": "k-Nearest Neighbour",
    "gnb": "Naive Bayes",
    "tree": "Decision Tree",
    "forest": "Random Forest",
    "mlp": "Neural Network",
    "consensus": "Consensus",
}

_MIN_LABELED_SLICE = 0.03


def render_pie(probs: np.ndarray, title: str, path: Path) -> Path:
    """One genre-distribution pie; slices below 3% stay unlabeled."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = [
        f"{name} {100.0 * p:.1f}%" if p >= _MIN_LABELED_SLICE else ""
        for name, p in zip(GENRES, probs)
    ]
    fig, ax = plt.subplots(figsize=(5.2, 5.2))
    colors = plt.cm.tab20(np.linspace(0.0, 0.95, len(GENRES)))
    ax.pie(probs, labels=labels, colors=colors, startangle=90,
           counterclock=False, textprops={"fontsize": 8})
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_report_charts(
    per_algorithm: dict[str, np.ndarray],
    consensus: np.ndarray,
    out_dir: str | Path,
    stem: str = "report",
) -> list[Path]:
    """Six pies (five algorithms + consensus) as PNG files in out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in MODEL_NAMES:
        path = out_dir / f"{stem}_{name}.png"
        written.append(render_pie(per_algorithm[name], MODEL_TITLES[name], path))
    path = out_dir / f"{stem}_consensus.png"
    written.append(render_pie(consensus, MODEL_TITLES["consensus"], path))
    return written


def render_grid_figure(grid: EvaluationGrid, path: str | Path) -> Path:
    """Green/Red outcome grid, one row per song, one column per run."""
    path = Path(path)
    runs = len(grid.rows[0].outcomes)
    songs = len(grid.rows)

    fig, ax = plt.subplots(figsize=(1.1 * runs + 4.0, 0.42 * songs + 1.6))
    for row_index, row in enumerate(grid.rows):
        y = songs - 1 - row_index
        for col, outcome in enumerate(row.outcomes):
            color = "#2e9e4f" if outcome.result == GREEN else "#c43c3c"
            ax.add_patch(plt.Rectangle((col, y), 0.92, 0.92, color=color))
    ax.set_xlim(-0.1, runs)
    ax.set_ylim(-0.1, songs)
    ax.set_xticks([c + 0.46 for c in range(runs)])
    ax.set_xticklabels([f"run {c + 1}" for c in range(runs)])
    ax.set_yticks([songs - 1 - r + 0.46 for r in range(songs)])
    ax.set_yticklabels([row.song_id for row in grid.rows], fontsize=8)
    ax.set_title(
        f"{grid.success_count}/{grid.total} Green, "
        f"success_rate={100.0 * grid.success_rate:.1f}%"
    )
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
