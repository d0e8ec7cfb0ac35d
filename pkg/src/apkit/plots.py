"""Optional matplotlib renderings of report data.

Imported lazily: the library and CLI work without matplotlib unless figure
output is requested. All renderers write a file and return its path.
"""
from __future__ import annotations

import os

import numpy as np


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, outdir: str, name: str) -> str:
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, name)
    fig.savefig(path, dpi=120)
    return path


def render_values(f, outdir: str, name: str = "values.png") -> str:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 3.2))
    if f.domain.ndim == 1:
        x = f.domain.coordinates()[0]
        ax.plot(x, f.values.real, lw=0.8, label="re")
        if not f.is_real():
            ax.plot(x, f.values.imag, lw=0.8, label="im")
            ax.legend(loc="best", fontsize=8)
        ax.set_xlabel("x")
    else:
        im = ax.imshow(np.abs(f.values).T, origin="lower", aspect="auto")
        fig.colorbar(im, ax=ax)
    ax.set_title(f.provenance or "grid function", fontsize=9)
    fig.tight_layout()
    out = _save(fig, outdir, name)
    plt.close(fig)
    return out


def render_per_n(est, outdir: str, name: str = "per_n.png") -> str:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ns = [n for n, _ in est.per_n]
    vs = [complex(v) for _, v in est.per_n]
    ax.plot(ns, [v.real for v in vs], marker=".", lw=0.8, label="re")
    if any(abs(v.imag) > 0 for v in vs):
        ax.plot(ns, [v.imag for v in vs], marker=".", lw=0.8, label="im")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("window index n")
    ax.set_ylabel("estimate")
    ax.set_title(f"status: {est.status}, gap {est.cauchy_gap:.3g}", fontsize=9)
    fig.tight_layout()
    out = _save(fig, outdir, name)
    plt.close(fig)
    return out


def render_periods(report, outdir: str, name: str = "periods.png") -> str:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 2.8))
    ts = [t for t, _ in report.periods]
    ds = [d for _, d in report.periods]
    ax.vlines(ts, 0, 1, lw=0.8)
    ax.plot(ts, ds, ".", ms=3)
    ax.axhline(report.epsilon, color="r", lw=0.8, ls="--")
    ax.set_xlim(report.scan_range)
    ax.set_xlabel("t")
    ax.set_title(f"{len(ts)} almost periods, max gap {report.max_gap:.3g}",
                 fontsize=9)
    fig.tight_layout()
    out = _save(fig, outdir, name)
    plt.close(fig)
    return out


def render_spectrum(report, outdir: str, name: str = "spectrum.png") -> str:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 3.2))
    if report.lines:
        xs = [l.freq[0] for l in report.lines]
        ys = [abs(l.coefficient) for l in report.lines]
        ax.stem(xs, ys, basefmt=" ")
    ax.axhline(report.threshold, color="r", lw=0.8, ls="--")
    ax.set_xlabel("frequency")
    ax.set_ylabel("|coefficient|")
    ax.set_title(f"{len(report.lines)} lines, residual "
                 f"{report.parseval_residual:.3g}", fontsize=9)
    fig.tight_layout()
    out = _save(fig, outdir, name)
    plt.close(fig)
    return out


def render_vanhove(report, outdir: str, name: str = "vanhove.png") -> str:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ns = [n for n, _ in report.entries]
    rs = [r for _, r in report.entries]
    ax.semilogy(ns, rs, marker=".", lw=0.8)
    ax.axhline(report.tolerance, color="r", lw=0.8, ls="--")
    ax.set_xlabel("n")
    ax.set_ylabel("boundary / volume")
    ax.set_title(f"verdict: {report.verdict}", fontsize=9)
    fig.tight_layout()
    out = _save(fig, outdir, name)
    plt.close(fig)
    return out


def render_classify(report, outdir: str, name: str = "classify.png") -> str:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ts = [row[0] for row in report.per_t]
    labels = ["sup", "stepanov", "weyl", "mean"]
    for i, lab in enumerate(labels):
        ax.plot(ts, [row[1 + i] for row in report.per_t], lw=0.8, label=lab)
    ax.axhline(report.classes[0].epsilon, color="r", lw=0.8, ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel("distance")
    ax.legend(loc="best", fontsize=8)
    verdicts = ", ".join(f"{c.name}:{c.verdict}" for c in report.classes)
    ax.set_title(verdicts, fontsize=8)
    fig.tight_layout()
    out = _save(fig, outdir, name)
    plt.close(fig)
    return out
