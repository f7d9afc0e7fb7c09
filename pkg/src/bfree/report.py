"""Figures written next to the CLI's delimited output."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _style(ax, xlabel, ylabel, title=None):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    # fixed metadata keeps repeated runs byte-identical for PNG/SVG
    fig.savefig(path, dpi=120, metadata={"Software": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_bernoulli(rows, path) -> Path:
    """Deviation from the uniform sign measure against Sigma, one series per width m."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for m in sorted({r.m for r in rows}):
        sel = [r for r in rows if r.m == m]
        xs = [float(r.sigma) for r in sel]
        ys = [float(r.deviation) for r in sel]
        errs = [3 * r.standard_error for r in sel]
        ax.errorbar(xs, ys, yerr=errs, marker="o", capsize=3, label=f"m={m} ({sel[0].method})")
    xs = sorted({float(r.sigma) for r in rows})
    ax.plot(xs, [math.exp(-2 * x) / 2 for x in xs], "k--", lw=1, label=r"$e^{-2\Sigma}/2$")
    ax.set_yscale("log")
    ax.legend()
    _style(ax, r"$\Sigma_K = \sum 1/a_k$", "max |pattern measure - 2^-m|")
    return _save(fig, path)


def plot_convergence(Ns, freqs, reference, path, label="empirical") -> Path:
    """Empirical frequency of a pattern against N, with the reference enclosure."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(Ns, [float(f) for f in freqs], marker=".", label=label)
    if reference is not None:
        ax.axhspan(float(reference.lo), float(reference.hi), color="C1", alpha=0.3)
        ax.axhline(float((reference.lo + reference.hi) / 2), color="C1", lw=1, label="reference")
    ax.set_xscale("log")
    ax.legend()
    _style(ax, "N", "frequency")
    return _save(fig, path)


def plot_histogram(values, reference, path, xlabel="short-interval frequency") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist([float(v) for v in values], bins=40, color="C0", alpha=0.8)
    if reference is not None:
        ax.axvline(float((reference.lo + reference.hi) / 2), color="C1", lw=2, label="reference")
        ax.legend()
    _style(ax, xlabel, "count")
    return _save(fig, path)
