"""Figure rendering for CLI reports.

Every helper draws one figure to a file and closes it; nothing is shown
interactively (the Agg backend is forced so the CLI works headless).
Figures are a convenience layer over the machine-readable outputs — every
number plotted here is also available in a CSV or report file.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .fir import FirFilter  # noqa: E402
from .signals import Signal, Spectrum  # noqa: E402

_FIGSIZE = (8.0, 4.5)
_DPI = 130


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_waveform_overlay(path, labeled_signals, title=None, max_seconds=None):
    """Overlay time-domain traces; ``labeled_signals`` is [(label, Signal)].

    ``max_seconds`` crops the view (not the data) so dense signals stay
    readable.
    """
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for label, sig in labeled_signals:
        t = np.arange(len(sig)) / sig.sample_rate
        keep = slice(None)
        if max_seconds is not None:
            keep = t <= max_seconds
        ax.plot(t[keep], sig.samples[keep], label=label, linewidth=1.0)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("amplitude")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize="small")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def save_spectrum_plot(path, spectrum: Spectrum, title=None):
    """One-sided amplitude spectrum in dB (relative to the peak bin)."""
    n = len(spectrum.bins)
    half = n // 2 + 1
    mags = np.abs(spectrum.bins[:half]) / max(n, 1)
    if half > 2:
        mags[1 : half - 1] *= 2.0  # fold negative frequencies
    ref = mags.max() if mags.size and mags.max() > 0 else 1.0
    db = 20 * np.log10(np.maximum(mags / ref, 1e-12))
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(spectrum.frequencies[:half], db, linewidth=1.0)
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel("magnitude [dB re peak]")
    ax.set_ylim(bottom=max(db.min() - 5, -140))
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def save_error_trace(path, trace, threshold=None, title=None):
    """Per-sweep mean |e| on a log axis, with the early-stop level if set."""
    trace = np.asarray(trace, dtype=np.float64)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.semilogy(np.arange(1, len(trace) + 1), trace, marker=".", linewidth=1.0)
    if threshold is not None and threshold > 0:
        ax.axhline(threshold, color="tab:red", linestyle="--", linewidth=1.0,
                   label=f"stop level {threshold:g}")
        ax.legend(fontsize="small")
    ax.set_xlabel("sweep")
    ax.set_ylabel("mean |error|")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    return _finish(fig, path)


def save_harmonic_comparison(path, harmonic_db_by_label, title=None):
    """Grouped bars of harmonic levels; input is {label: levels_in_dB}."""
    labels = list(harmonic_db_by_label)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    if labels:
        count = len(next(iter(harmonic_db_by_label.values())))
        x = np.arange(1, count + 1, dtype=float)
        width = 0.8 / max(len(labels), 1)
        for pos, label in enumerate(labels):
            levels = np.asarray(harmonic_db_by_label[label], dtype=np.float64)
            offset = (pos - (len(labels) - 1) / 2) * width
            ax.bar(x + offset, levels, width=width, label=label)
        ax.set_xticks(x)
        ax.set_xticklabels([f"H{int(k)}" for k in x])
        ax.legend(fontsize="small")
    ax.set_xlabel("harmonic")
    ax.set_ylabel("level [dB re fundamental]")
    if title:
        ax.set_title(title)
    ax.grid(True, axis="y", alpha=0.3)
    return _finish(fig, path)


def save_mse_bars(path, names, values, title=None):
    """Log-scale MSE bars, one per test signal."""
    values = np.asarray(values, dtype=np.float64)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.bar(range(len(names)), np.maximum(values, 1e-300))
    ax.set_yscale("log")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=20, ha="right", fontsize="small")
    ax.set_ylabel("MSE")
    if title:
        ax.set_title(title)
    ax.grid(True, axis="y", which="both", alpha=0.3)
    return _finish(fig, path)


def save_filter_response(path, filt: FirFilter, title=None):
    """Magnitude response in dB with the passband edges marked."""
    freqs, response = filt.response()
    db = 20 * np.log10(np.maximum(np.abs(response), 1e-12))
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(freqs, db, linewidth=1.0)
    for edge in filt.band:
        ax.axvline(edge, color="tab:gray", linestyle=":", linewidth=1.0)
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel("magnitude [dB]")
    ax.set_ylim(-100, 5)
    if title is None:
        title = f"{filt.kind} order {filt.order} @ {filt.sample_rate:g} Hz"
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)
