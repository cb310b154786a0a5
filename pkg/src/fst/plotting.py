"""Matplotlib figures written next to reports and stylized outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from fst.metrics import VerificationReport  # noqa: E402
from fst.spectral import amplitude_view, phase_view  # noqa: E402

FIG_DPI = 120


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=FIG_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def _display(f: np.ndarray) -> np.ndarray:
    g = np.clip(f, 0, 255) / 255.0
    return g[0] if g.shape[0] != 3 else g.transpose(1, 2, 0)


def plot_report(report: VerificationReport, path) -> Path:
    """Residual against tolerance per check, log scale."""
    names = [e.name for e in report.entries]
    floor = 1e-18
    res = [max(e.residual, floor) for e in report.entries]
    tol = [max(e.tolerance, floor) for e in report.entries]
    colors = ["tab:green" if e.passed else "tab:red" for e in report.entries]
    y = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(7, 0.28 * len(names) + 1.2))
    ax.barh(y, res, color=colors, left=0)
    ax.scatter(tol, y, marker="|", color="k", s=120, label="tolerance")
    ax.set_xscale("log")
    ax.set_yticks(y)
    ax.set_yticklabels(names, fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("residual")
    ax.legend(loc="lower right", fontsize=7)
    ax.set_title(f"verification (seed {report.seed}): "
                 f"{sum(e.passed for e in report.entries)}/{len(names)} passed", fontsize=9)
    return _save(fig, path)


def plot_spectrum(f: np.ndarray, path, title: str = "") -> Path:
    """Per-channel log-amplitude and phase panels (centered layout)."""
    amp, ph = amplitude_view(f), phase_view(f)
    c = f.shape[0]
    fig, axes = plt.subplots(2, c, figsize=(2.4 * c, 4.8), squeeze=False)
    for k in range(c):
        axes[0, k].imshow(amp[k], cmap="gray", vmin=0, vmax=255)
        axes[0, k].set_title(f"log|S| ch{k}", fontsize=8)
        axes[1, k].imshow(ph[k], cmap="twilight", vmin=0, vmax=255)
        axes[1, k].set_title(f"phase ch{k}", fontsize=8)
    for ax in axes.ravel():
        ax.set_xticks([])
        ax.set_yticks([])
    if title:
        fig.suptitle(title, fontsize=9)
    return _save(fig, path)


def plot_stylize(content: np.ndarray, style: np.ndarray, output: np.ndarray, path,
                 title: str = "") -> Path:
    panels = [("content", content), ("style", style), ("output", output)]
    fig, axes = plt.subplots(1, 3, figsize=(8, 3))
    for ax, (name, img) in zip(axes, panels):
        if img.shape[0] in (1, 3):
            ax.imshow(_display(img), cmap="gray" if img.shape[0] == 1 else None, vmin=0, vmax=1)
        else:
            ax.imshow(img[0], cmap="gray")
        ax.set_title(name, fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    if title:
        fig.suptitle(title, fontsize=9)
    return _save(fig, path)
