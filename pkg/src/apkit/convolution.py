"""Ordinary, atomic-measure, and van Hove averaged (Eberlein) convolutions.

Ordinary convolution is quadrature against cell volume; on wrapping axes it
is exact circular convolution. Grid data on zero-extend axes is compactly
supported by construction, so the classical integrability preconditions are
met automatically, but contaminated margins are rejected: fabricated zeros
inside a convolution would silently corrupt every output cell they reach.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .domain import Axis, DomainSpec, SupportExhausted, VanHoveSequence, Window
from .signals import AtomicMeasure, GridFunction, grid_function, reflect, translate
from .weyl import (CONVERGED, DEFAULT_TOL, NOT_CONVERGED, SUPPORT_EXHAUSTED,
                   MeanEstimate, _tail_gap)


def _require_clean_flat_margins(f: GridFunction, what: str) -> None:
    for i, (lo, hi) in enumerate(f.margin):
        if (lo or hi) and not f.domain.axis_wraps(i):
            raise ValueError(f"{what} has contaminated margin on axis {i}; "
                             "convolution would spread the contamination")


def _conv_axis(a1: Axis, a2: Axis) -> Axis:
    if (a1.kind, a1.n, a1.h) != (a2.kind, a2.n, a2.h):
        raise ValueError("operand axes differ in kind, size, or step")
    if a1.wraps:
        if a1.origin != a2.origin:
            raise ValueError("wrapping operand axes differ in origin")
        return a1
    n = a1.n + a2.n - 1
    if a1.kind == "integer":
        return Axis("integer", n, 1.0, a1.origin + a2.origin)
    return Axis("real", n, a1.h, a1.origin + a2.origin + a1.h / 2)


def convolve(f: GridFunction, g: GridFunction) -> GridFunction:
    """Quadrature convolution sum_y f(x-y) g(y) cellvol.

    Wrapping axes convolve circularly and keep their size; zero-extend axes
    expand to n1+n2-1 cells (real axes also shift the cell-center lattice to
    the sums of the operand centers). 1D inputs take the direct numpy path.
    """
    if f.domain.axes == g.domain.axes and f.domain.ndim == 1:
        _require_clean_flat_margins(f, "left operand")
        _require_clean_flat_margins(g, "right operand")
        ax = f.domain.axes[0]
        cellvol = f.domain.cell_volume
        full = np.convolve(f.values, g.values) * cellvol
        if ax.wraps:
            out = full[:ax.n].copy()
            out[:ax.n - 1] += full[ax.n:]
            return grid_function(f.domain, out, provenance="convolve")
        dom = DomainSpec((_conv_axis(ax, g.domain.axes[0]),), f.domain.boundary_mode)
        return grid_function(dom, full, provenance="convolve")

    _require_clean_flat_margins(f, "left operand")
    _require_clean_flat_margins(g, "right operand")
    if f.domain.ndim != g.domain.ndim:
        raise ValueError("operands have different dimensions")
    axes = tuple(_conv_axis(a1, a2) for a1, a2 in zip(f.domain.axes, g.domain.axes))
    dom = DomainSpec(axes, f.domain.boundary_mode)
    out = np.zeros(dom.shape, dtype=np.complex128)
    cellvol = f.domain.cell_volume
    gv = g.values
    for j in zip(*np.nonzero(gv)):
        block = f.values * (gv[j] * cellvol)
        index = []
        for i, ax in enumerate(f.domain.axes):
            if ax.wraps:
                block = np.roll(block, j[i], axis=i)
                index.append(slice(None))
            else:
                index.append(slice(j[i], j[i] + ax.n))
        out[tuple(index)] += block
    return grid_function(dom, out, provenance="convolve")


def convolve_measure(f: GridFunction, mu: AtomicMeasure) -> GridFunction:
    """sum_i w_i f(x - y_i): a weighted superposition of translates, exact.

    Atom positions snap to whole cells; the largest snap distance is recorded
    on the result. Margins take the worst contamination over the translates.
    """
    if not mu.atoms:
        raise ValueError("measure has no atoms")
    acc = None
    margin = [list(m) for m in f.margin]
    snap = f.snap_distance
    for pos, w in mu.atoms:
        ft = translate(f, pos)
        term = ft.values * w
        acc = term if acc is None else acc + term
        snap = max(snap, ft.snap_distance)
        for i, (lo, hi) in enumerate(ft.margin):
            margin[i][0] = max(margin[i][0], lo)
            margin[i][1] = max(margin[i][1], hi)
    return GridFunction(f.domain, acc, tuple((lo, hi) for lo, hi in margin),
                        provenance="convolve_measure", snap_distance=snap,
                        info={"atoms": len(mu.atoms)})


# -- Eberlein convolution -------------------------------------------------------------

@dataclass(frozen=True)
class EberleinResult:
    """(f eberlein g) materialized on an evaluation lattice, with evidence.

    function.values[k] estimates the averaged convolution at the k-th
    cell-aligned translation. probes holds per-point MeanEstimate tables; the
    worst status over the probes is the existence diagnostic.
    """

    function: GridFunction
    probes: tuple[tuple[float, MeanEstimate], ...]

    @property
    def estimate(self) -> MeanEstimate:
        return self.probes[0][1]

    @property
    def status(self) -> str:
        order = {CONVERGED: 0, NOT_CONVERGED: 1, SUPPORT_EXHAUSTED: 2}
        return max((e.status for _, e in self.probes), key=order.__getitem__)

    def to_json(self) -> dict:
        return {"status": self.status,
                "probes": [[x, e.to_json()] for x, e in self.probes]}


def _eval_lattice(domain: DomainSpec, eval_window: Window | None):
    """Translation offsets (in cells) and the domain carrying the outputs."""
    if domain.all_wrap:
        if eval_window is not None:
            raise ValueError("evaluation window only applies to non-wrapping domains")
        offsets = [np.arange(ax.n) for ax in domain.axes]
        axes = tuple(ax if ax.kind != "torus"
                     else Axis("torus", ax.n, ax.h, ax.origin - ax.h / 2)
                     for ax in domain.axes)
        return offsets, DomainSpec(axes, domain.boundary_mode)
    if domain.ndim != 1:
        raise ValueError("non-wrapping Eberlein needs a one-axis domain")
    if eval_window is None:
        raise ValueError("an evaluation window is required on non-wrapping domains")
    ax = domain.axes[0]
    lo = eval_window.offset[0]
    hi = lo + eval_window.side_lengths[0]
    k_lo = int(np.ceil(lo / ax.h - 1e-9))
    k_hi = int(np.floor(hi / ax.h + 1e-9))
    if k_hi < k_lo:
        raise ValueError("evaluation window contains no lattice point")
    if ax.kind == "integer":
        out_ax = Axis("integer", k_hi - k_lo + 1, 1.0, float(k_lo))
    else:
        out_ax = Axis("real", k_hi - k_lo + 1, ax.h, k_lo * ax.h - ax.h / 2)
    return [np.arange(k_lo, k_hi + 1)], DomainSpec((out_ax,), domain.boundary_mode)


def eberlein(f: GridFunction, g: GridFunction, seq: VanHoveSequence,
             eval_window: Window | None = None, n_max: int | None = None,
             tol: float = DEFAULT_TOL, probe_xs=None) -> EberleinResult:
    """Averaged convolution: mean over y in A_n of f(x-y) g(y), at the last n.

    Evaluation points x run over cell-aligned translations (the whole group
    on wrapping domains, a required window otherwise). Each point averages
    the product of the reflected-translated left operand with the right
    operand; probe points additionally keep the full per-n table. Direct
    summation throughout, deterministic.
    """
    if f.domain != g.domain:
        raise ValueError("operands live on different domains")
    n_stop = seq.n_max if n_max is None else min(int(n_max), seq.n_max)
    offsets, out_dom = _eval_lattice(f.domain, eval_window)
    fr = reflect(f)
    h0 = f.domain.axes[0].h

    def product(cells) -> GridFunction:
        t = tuple(float(c) * ax.h for c, ax in zip(cells, f.domain.axes))
        ft = translate(fr, t)
        vals = ft.values * g.values
        margin = tuple((max(a[0], b[0]), max(a[1], b[1]))
                       for a, b in zip(ft.margin, g.margin))
        return GridFunction(f.domain, vals, margin)

    def largest_fitting(prod: GridFunction) -> int:
        for n in range(n_stop, 0, -1):
            try:
                starts, counts, _ = _engine.resolve_window(f.domain, seq.window(n))
                _engine.check_window_fits(f.domain, prod.margin, starts, counts)
            except ValueError:
                continue
            return n
        raise SupportExhausted("no averaging window fits the trusted support "
                               "at an evaluation point")

    def point_value(cells) -> complex:
        prod = product(cells)
        n = largest_fitting(prod)
        starts, counts, _ = _engine.resolve_window(f.domain, seq.window(n))
        ncells = 1
        for c in counts:
            ncells *= c
        return complex(_engine.box_sum(prod.values, f.domain, starts, counts) / ncells)

    grids = np.meshgrid(*offsets, indexing="ij")
    points = list(zip(*(g_.ravel() for g_ in grids)))
    vals = np.array(_engine.map_ordered(point_value, points),
                    dtype=np.complex128).reshape(out_dom.shape)
    func = grid_function(out_dom, vals, provenance="eberlein")

    if probe_xs is None:
        probe_xs = (0.0,) if f.domain.ndim == 1 else ((0.0,) * f.domain.ndim,)
    probes = []
    for x in probe_xs:
        cells = tuple(int(round(c / ax.h)) for c, ax in
                      zip(f.domain.point(x), f.domain.axes))
        prod = product(cells)
        summer = _engine.BoxSummer(prod.values, f.domain)
        per_n: list[tuple[int, complex]] = []
        exhausted = False
        for n in range(1, n_stop + 1):
            try:
                starts, counts, _ = _engine.resolve_window(f.domain, seq.window(n))
                _engine.check_window_fits(f.domain, prod.margin, starts, counts)
            except ValueError:
                exhausted = True
                break
            ncells = 1
            for c in counts:
                ncells *= c
            per_n.append((n, complex(summer.box(starts, counts) / ncells)))
        if not per_n:
            raise SupportExhausted("no averaging window fits at a probe point")
        series = [v for _, v in per_n]
        gap = _tail_gap(series)
        value = series[-1]
        conv = gap < tol * max(1.0, abs(value))
        status = SUPPORT_EXHAUSTED if exhausted else (CONVERGED if conv else NOT_CONVERGED)
        probes.append((float(cells[0] * h0) if f.domain.ndim == 1 else 0.0,
                       MeanEstimate(value=value, per_n=tuple(per_n), cauchy_gap=gap,
                                    converged=conv and not exhausted, status=status,
                                    tol=tol)))
    return EberleinResult(function=func, probes=tuple(probes))
