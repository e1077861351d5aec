"""Static figures for the command-line reports (rendered off-screen)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

golden_mean = (math.sqrt(5) - 1.0) / 2.0
fig_width = 5.0

params = {
    "axes.labelsize": 10,
    "font.size": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.2,
    "lines.markersize": 3,
    "figure.dpi": 150,
    "savefig.dpi": 150,
    "svg.hashsalt": "csfqlab",
}


def new_figure(nrows=1, ncols=1, height=None):
    with plt.rc_context(params):
        fig, ax = plt.subplots(nrows, ncols, figsize=(fig_width, height or fig_width * golden_mean))
    return fig, ax


def save_figure(fig, path) -> Path:
    """Write `fig` to `path` with no timestamp so reruns are byte-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = path.suffix.lstrip(".").lower() or "png"
    metadata = {
        "png": {"Software": None},
        "svg": {"Date": None},
        "pdf": {"Producer": None, "CreationDate": None},
    }.get(fmt, {})
    with plt.rc_context(params):
        fig.tight_layout()
        fig.savefig(path, format=fmt, metadata=metadata)
    plt.close(fig)
    return path


def plot_flux_sweep(spectra, path, max_levels=4):
    fig, ax = new_figure()
    flux = np.array([s.flux for s in spectra])
    levels = np.array([s.levels for s in spectra]) / 1e9
    for k in range(1, min(levels.shape[1], max_levels + 1)):
        ax.plot(flux, levels[:, k], label=f"E{k} - E0")
    ax.set_xlabel(r"flux bias $\Phi/\Phi_0$")
    ax.set_ylabel("frequency (GHz)")
    ax.legend(loc="best")
    return save_figure(fig, path)


def plot_traces(traces, labels, path):
    """Stacked spectroscopy traces, each normalized to its own maximum."""
    fig, ax = new_figure(height=fig_width * 0.75)
    for k, (trace, label) in enumerate(zip(traces, labels)):
        amp = trace.amplitude / (trace.amplitude.max() or 1.0)
        offset = 1.2 * (len(traces) - 1 - k)
        ax.plot(trace.freqs / 1e9, amp + offset, label=label)
        for p in trace.peaks:
            if p.label[2] > 1:
                ax.annotate(
                    f"{p.label[0]}-{p.label[1]}/{p.label[2]}",
                    (p.center / 1e9, offset + min(1.0, p.height / (trace.amplitude.max() or 1.0))),
                    fontsize=6,
                    ha="center",
                    va="bottom",
                )
    ax.set_xlabel("drive frequency (GHz)")
    ax.set_ylabel("amplitude (a.u., offset)")
    ax.set_yticks([])
    ax.legend(loc="upper right")
    return save_figure(fig, path)


def plot_t1_temperature(temps, t1, path, band=None, marks=()):
    fig, ax = new_figure()
    ax.plot(np.asarray(temps) * 1e3, np.asarray(t1) * 1e6, "-", label="thermal quasiparticles")
    if band is not None:
        ax.axhspan(band[0] * 1e6, band[1] * 1e6, color="0.85", zorder=0, label="repeat-measurement range")
    for temp, value in marks:
        ax.plot([temp * 1e3], [value * 1e6], "o", color="k")
    ax.set_xlabel("mixing chamber temperature (mK)")
    ax.set_ylabel(r"$T_1$ ($\mu$s)")
    ax.legend(loc="lower left")
    return save_figure(fig, path)
