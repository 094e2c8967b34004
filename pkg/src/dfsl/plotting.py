"""PNG figures for solve and verify runs.

Figures are built on :class:`matplotlib.figure.Figure` directly so no pyplot
state or interactive backend is involved.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

__all__ = ["plot_eigenfunctions", "plot_spectrum", "plot_report"]

FIGSIZE = (6.4, 4.0)
DPI = 120


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    return path


def plot_eigenfunctions(points, decomp, path, count: int = 4) -> Path:
    """Lowest *count* eigenvectors against the grid points."""
    points = np.asarray(points)
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    for k in range(min(count, decomp.values.size)):
        ax.plot(points, decomp.vectors[:, k], marker="o", markersize=3,
                label=rf"$\lambda_{{{k + 1}}} = {decomp.values[k]:.6g}$")
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("x(t)")
    ax.legend(fontsize="small")
    return _save(fig, path)


def plot_spectrum(values, path, reference=None) -> Path:
    """Eigenvalues by index, optionally against a reference spectrum."""
    values = np.asarray(values)
    k = np.arange(1, values.size + 1)
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    ax.plot(k, values, "o", label="computed")
    if reference is not None:
        ax.plot(k, np.asarray(reference), "x", label="reference")
        ax.legend(fontsize="small")
    ax.set_xlabel("index k")
    ax.set_ylabel(r"$\lambda_k$")
    return _save(fig, path)


def plot_report(report, path) -> Path:
    """Observed/tolerance ratio of every check, grouped by kind, on a log scale.

    Points below the line at 1 pass. Non-finite observations are drawn at the top.
    """
    kinds: list[str] = []
    groups: dict[str, list] = {}
    for r in report.results:
        kind = r.name.split("[", 1)[0]
        if kind not in groups:
            kinds.append(kind)
            groups[kind] = []
        groups[kind].append(r)

    floor = 1e-20
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    rng = np.random.default_rng(0)
    for i, kind in enumerate(kinds):
        ratios = np.array([
            r.observed / r.tolerance if np.isfinite(r.observed) and r.tolerance > 0 else 1e3
            for r in groups[kind]])
        ratios = np.maximum(ratios, floor)
        passed = np.array([r.passed for r in groups[kind]])
        x = i + rng.uniform(-0.25, 0.25, ratios.size)
        ax.scatter(x[passed], ratios[passed], s=8, color="tab:green")
        ax.scatter(x[~passed], ratios[~passed], s=14, color="tab:red", marker="x")
    ax.set_xticks(np.arange(len(kinds)), labels=kinds, rotation=30, ha="right",
                  fontsize="small")
    ax.set_yscale("log")
    ax.axhline(1.0, color="k", lw=0.8)
    ax.set_ylabel("observed / tolerance")
    s = report.summary
    ax.set_title(f"{s['passed']}/{s['total']} checks passed", fontsize="medium")
    return _save(fig, path)
