"""Grouped bar charts of report scores, rendered off-screen to PNG."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .report import report_axes, score_grid  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.fontsize": 7,
    "legend.frameon": False,
    "savefig.dpi": 120,
    "svg.hashsalt": "behavrating",
}
# fixed PNG metadata keeps the bytes reproducible
PNG_METADATA = {"Software": None}

BASELINES = {"accuracy": 0.5}


def plot_scores(report: dict, out_dir: Path) -> list[Path]:
    """One figure per metric: setups on the x axis, one bar per source."""
    setups, sources, metrics = report_axes(report)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for metric in metrics:
        grid = score_grid(report, metric)
        with plt.rc_context(STYLE):
            fig, ax = plt.subplots(figsize=(1.2 + 0.45 * len(sources) * len(setups), 3.2))
            x = np.arange(len(setups))
            width = 0.8 / max(1, len(sources))
            cmap = plt.get_cmap("tab10")
            for i, source in enumerate(sources):
                vals = [grid.get((s, source), {}).get("value") for s in setups]
                heights = [np.nan if v is None else 100 * v for v in vals]
                ax.bar(x + (i - (len(sources) - 1) / 2) * width, heights, width, label=source, color=cmap(i % 10))
            if metric in BASELINES:
                ax.axhline(100 * BASELINES[metric], color="0.4", lw=0.8, ls="--")
            ax.set_xticks(x, setups)
            ax.set_ylabel(f"{metric} (%)")
            finite = [100 * r["value"] for r in grid.values() if r["value"] is not None]
            if finite:
                ax.set_ylim(max(0.0, min(finite) - 10), min(100.0, max(finite) + 5))
            ax.legend(ncols=min(len(sources), 6), loc="upper center", bbox_to_anchor=(0.5, 1.18))
            fig.tight_layout()
            path = out_dir / f"scores_{metric}.png"
            fig.savefig(path, metadata=PNG_METADATA)
            plt.close(fig)
        paths.append(path)
    return paths
