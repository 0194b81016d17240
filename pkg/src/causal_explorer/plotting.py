"""SVG result figures for ensemble runs and feature-count sweeps.

Every (selector, algorithm) series is drawn as one matplotlib artist whose
SVG group id is ``series-<fs>-<cd>``, so the output can be checked or
post-processed without parsing paths.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .ensemble import DISPLAY_NAMES, RunRecord  # noqa: E402

SVG_METADATA = {"Date": None, "Creator": None}

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "causal-explorer",
    "svg.fonttype": "none",
}


def _series(records: Iterable[RunRecord]) -> dict[tuple[str, str], list[RunRecord]]:
    out: dict[tuple[str, str], list[RunRecord]] = defaultdict(list)
    for r in records:
        if r.ok:
            out[(r.fs_algo, r.cd_algo)].append(r)
    return dict(sorted(out.items()))


def _label(fs: str, cd: str) -> str:
    return f"{DISPLAY_NAMES.get(cd, cd)} / {DISPLAY_NAMES.get(fs, fs)}"


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return path


def plot_metric_vs_k(records: list[RunRecord], metric: str, path) -> Path:
    """Line per (selector, algorithm): ``metric`` against the feature count."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for (fs, cd), rows in _series(records).items():
            rows = sorted(rows, key=lambda r: r.n_features)
            (line,) = ax.plot([r.n_features for r in rows], [getattr(r, metric) for r in rows],
                              marker="o", markersize=3, linewidth=1, label=_label(fs, cd))
            line.set_gid(f"series-{fs}-{cd}")
        ax.set_xlabel("number of selected features")
        ax.set_ylabel(metric.upper())
        ax.legend(fontsize=6, ncol=2)
        fig.tight_layout()
        return _save(fig, Path(path))


def plot_shd_vs_auprc(records: list[RunRecord], path) -> Path:
    """Scatter of SHD against AUPRC, one point set per (selector, algorithm)."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for (fs, cd), rows in _series(records).items():
            pts = ax.scatter([r.shd for r in rows], [r.auprc for r in rows], s=14,
                             label=_label(fs, cd))
            pts.set_gid(f"series-{fs}-{cd}")
        ax.set_xlabel("SHD")
        ax.set_ylabel("AUPRC")
        ax.legend(fontsize=6, ncol=2)
        fig.tight_layout()
        return _save(fig, Path(path))


def plot_sweep(records: list[RunRecord], out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    return [
        plot_metric_vs_k(records, "shd", out_dir / "shd_vs_k.svg"),
        plot_metric_vs_k(records, "auprc", out_dir / "auprc_vs_k.svg"),
        plot_shd_vs_auprc(records, out_dir / "shd_vs_auprc.svg"),
    ]
