"""Figures written next to the CSV/JSON output of the CLI."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "shelfmix"  # stable element ids across runs
import matplotlib.pyplot as plt  # noqa: E402


def _finish(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical for svg/pdf
    fig.savefig(path, dpi=150, metadata={"Date": None} if path.suffix in {".svg", ".pdf"} else None)
    plt.close(fig)
    return path


def plot_tv_table(
    n: int,
    ms: Sequence[int],
    exact: Sequence[float],
    asymptotic: Sequence[float],
    path: str | Path,
) -> Path:
    """Exact distance as dots and the limiting formula as a line, log-scaled in m."""
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.semilogx(ms, asymptotic, color="gray", lw=1.5, label="asymptotic")
    ax.semilogx(ms, exact, "o", color="black", ms=2, label="exact")
    ax.set_xlabel("m (number of shelves)")
    ax.set_ylabel("total variation")
    ax.set_title(f"{n}-card deck")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, which="major", alpha=0.4)
    ax.legend(loc="upper right")
    return _finish(fig, path)


def plot_profile(thetas: Sequence[float], tvs: Sequence[float], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(thetas, tvs, "-o", color="black", ms=3)
    ax.set_xlabel(r"$\theta$ (passes beyond $\frac{5}{4}\log_2 n$)")
    ax.set_ylabel("total variation")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.4)
    return _finish(fig, path)
