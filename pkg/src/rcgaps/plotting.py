"""Figures for the report commands.  Always renders off-screen (Agg)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .constset import ConstantTable  # noqa: E402
from .gapscan import GapFunction, MersenneDensityReport, NongappyReport  # noqa: E402

# fixed metadata keeps repeated renders byte-stable
_META = {"png": {"Software": None}, "svg": {"Date": None}, "pdf": {"CreationDate": None}}


def _save(fig, path) -> str:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fmt = p.suffix.lstrip(".").lower() or "png"
    fig.savefig(p, format=fmt, metadata=_META.get(fmt), dpi=100)
    plt.close(fig)
    return str(p)


def plot_mersenne_density(report: MersenneDensityReport, path) -> str:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    lengths = [L for L, _ in report.mu]
    ax1.step(lengths, [m for _, m in report.mu], where="post", label="mu(L)")
    ax1.plot(lengths, [v for _, v in report.reference_curve], "--", label="e^gamma log2 L")
    ax1.set_xscale("log", base=2)
    ax1.set_xlabel("bit length L")
    ax1.set_ylabel("Mersenne primes of length <= L")
    ax1.legend()
    ax2.plot(range(1, len(report.successor_ratios) + 1),
             [r for _, _, r in report.successor_ratios], "o-")
    ax2.set_xlabel("i")
    ax2.set_ylabel("ln|M_(i+1)| / ln|M_i|")
    fig.tight_layout()
    return _save(fig, path)


def plot_successor_lengths(report: NongappyReport, f: GapFunction, path) -> str:
    pairs = report.below_threshold + report.witness_pairs
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [p[2] for p in pairs]
    ax.plot(xs, [p[3] for p in pairs], "o", label="|successor|")
    bound = [f(L) for L in xs]
    ax.plot(xs, [b if math.isfinite(b) else float("nan") for b in bound], "-", label=f"F = {f.spec}")
    ax.axvline(f.n0, color="grey", lw=0.8, ls=":")
    ax.set_xlabel("|m| (largest member of each length)")
    ax.set_ylabel("bit length")
    if any(b > 64 * max(xs or [1]) for b in bound):
        ax.set_yscale("log", base=2)
    ax.set_title(f"{report.set_name}: {'pass' if report.passed else 'FAIL'}")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_constant_lengths(table: ConstantTable, path) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    idx = range(1, table.m + 1)
    ax.plot(idx, [v.bit_length() for v in table.c], "o-", label="|c_i|")
    ax.plot(idx, [v.bit_length() for v in table.a], "s--", label="|a_i|")
    ax.set_xlabel("i")
    ax.set_ylabel("bit length")
    ax.set_title(f"constants for {table.set_name}")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)
