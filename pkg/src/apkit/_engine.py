"""Windowed quadrature engine shared by the norm, mean, and scan modules.

Everything here is deterministic by construction. Sliding-window sums use one
of two routes, chosen by a fixed size threshold:

  direct   a sliding view reduced along its last axis; numpy reduces that axis
           with the same pairwise tree at every position, so window sums are
           exactly translation covariant (rolling the data rolls the sums
           bit-for-bit)
  prefix   cumulative-sum differences; O(1) per window, used when the
           cells-times-window product gets large; covariant only to roundoff

Scan maxima break ties toward the lexicographically smallest window position
(numpy argmax returns the first maximum in C order). Parallel maps preserve
input order, so the thread count never changes any result.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .domain import DomainSpec, SupportExhausted, Window

# direct-route bound on cells * window_length per axis pass
DIRECT_SUM_LIMIT = 1 << 24


def thread_count() -> int:
    """Worker cap from APKIT_THREADS (default 1 = serial)."""
    raw = os.environ.get("APKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def map_ordered(fn, items):
    """Map preserving order; threads only above the env cap of one."""
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


# -- window-to-cell resolution -------------------------------------------------

def axis_cells(ax, offset: float, length: float) -> tuple[int, int, float]:
    """Map [offset, offset+length) on one axis to (start_cell, count, snap).

    Cell-aligned inputs resolve exactly; anything else snaps to the nearest
    cell boundary and the worst snap distance is returned for metadata. For
    real/torus axes the box [origin + a h, origin + (a+m) h) holds exactly the
    centers a..a+m-1; for lattice axes it holds the integers directly.
    """
    rel = (offset - ax.origin) / ax.h
    start = int(math.floor(rel + 0.5))
    m = length / ax.h
    count = int(math.floor(m + 0.5))
    if count < 1:
        raise ValueError("window is smaller than one cell on some axis")
    snap = max(abs(rel - start) * ax.h, abs(m - count) * ax.h)
    return start, count, snap


def resolve_window(domain: DomainSpec, w: Window) -> tuple[tuple[int, ...], tuple[int, ...], float]:
    """Per-axis (start, count) cells of a window plus the worst snap distance."""
    if w.ndim != domain.ndim:
        raise ValueError("window dimension does not match the domain")
    starts, counts, snap = [], [], 0.0
    for i, ax in enumerate(domain.axes):
        s, c, d = axis_cells(ax, w.offset[i], w.side_lengths[i])
        if domain.axis_wraps(i):
            # a compact (wrapping) axis saturates: a window wider than one
            # period covers the whole circle exactly once
            c = min(c, ax.n)
            s %= ax.n
        starts.append(s)
        counts.append(c)
        snap = max(snap, d)
    return tuple(starts), tuple(counts), snap


def check_window_fits(domain: DomainSpec, margin, starts, counts) -> None:
    """Reject fixed windows that leave the trusted region of a flat axis."""
    for i, ax in enumerate(domain.axes):
        if domain.axis_wraps(i):
            continue
        lo, hi = margin[i]
        if starts[i] < lo or starts[i] + counts[i] > ax.n - hi:
            raise ValueError(
                "window escapes the trusted support on a zero-extend axis "
                f"(axis {i}: cells [{starts[i]}, {starts[i] + counts[i]}) vs trusted "
                f"[{lo}, {ax.n - hi}))")


# -- fixed-position box sums -----------------------------------------------------

def box_sum(values: np.ndarray, domain: DomainSpec, starts, counts):
    """Direct sum of values over one box of cells (wrap-aware gather)."""
    idx = []
    for i, ax in enumerate(domain.axes):
        r = starts[i] + np.arange(counts[i])
        if domain.axis_wraps(i):
            r %= ax.n
        elif r[0] < 0 or r[-1] >= ax.n:
            raise ValueError("box leaves the sampled support on a zero-extend axis")
        idx.append(r)
    block = values[np.ix_(*idx)] if len(idx) > 1 else values[idx[0]]
    return block.sum()


class BoxSummer:
    """Prefix-sum integral image for many box sums over one array.

    Wrapping axes are padded with one extra period so any in-range window is a
    contiguous slab. Each box sum is a 2^d-corner inclusion-exclusion lookup.
    Deterministic (prefix route), intended for nested per-n window tables at a
    fixed base point.
    """

    def __init__(self, values: np.ndarray, domain: DomainSpec):
        self.domain = domain
        arr = values
        for i in range(domain.ndim):
            n = domain.axes[i].n
            if domain.axis_wraps(i) and n > 1:
                pad = np.take(arr, np.arange(n - 1), axis=i)
                arr = np.concatenate([arr, pad], axis=i)
        cum = arr.astype(np.complex128 if np.iscomplexobj(values) else np.float64)
        for i in range(domain.ndim):
            cum = np.cumsum(cum, axis=i)
            zshape = list(cum.shape)
            zshape[i] = 1
            cum = np.concatenate([np.zeros(zshape, dtype=cum.dtype), cum], axis=i)
        self.cum = cum

    def box(self, starts, counts):
        d = self.domain.ndim
        total = 0.0
        los, his = [], []
        for i in range(d):
            s, c = starts[i], counts[i]
            n = self.domain.axes[i].n
            if self.domain.axis_wraps(i):
                s %= n
                if c > n:
                    raise ValueError("window exceeds the group extent on a wrapping axis")
            else:
                if s < 0 or s + c > n:
                    raise ValueError("box leaves the sampled support on a zero-extend axis")
            los.append(s)
            his.append(s + c)
        for corner in range(1 << d):
            idx = []
            sign = 1
            for i in range(d):
                if corner & (1 << i):
                    idx.append(los[i])
                    sign = -sign
                else:
                    idx.append(his[i])
            total = total + sign * self.cum[tuple(idx)]
        return total


# -- sliding scans ----------------------------------------------------------------

def _axis_sliding_sums(arr: np.ndarray, axis: int, m: int, lo: int, hi: int,
                       wraps: bool, n: int) -> np.ndarray:
    """Sums over windows of m cells along one axis.

    Flat axes produce starts lo..hi inclusive; wrapping axes produce all n
    starts on the padded array. The direct route keeps exact translation
    covariance; the prefix route takes over past DIRECT_SUM_LIMIT.
    """
    a = np.moveaxis(arr, axis, -1)
    if wraps:
        if m > 1:
            a = np.concatenate([a, a[..., : m - 1]], axis=-1)
        span = a.shape[-1]
        first, last = 0, n - 1
    else:
        a = a[..., lo: hi + m]
        span = a.shape[-1]
        first, last = 0, hi - lo
    n_windows = last - first + 1
    if a.size * m <= DIRECT_SUM_LIMIT:
        sums = sliding_window_view(a, m, axis=-1).sum(axis=-1)
    else:
        c = np.cumsum(a, axis=-1, dtype=a.dtype)
        zeros = np.zeros(a.shape[:-1] + (1,), dtype=a.dtype)
        c = np.concatenate([zeros, c], axis=-1)
        sums = c[..., m:] - c[..., :-m]
    assert sums.shape[-1] == n_windows == span - m + 1
    return np.moveaxis(sums, -1, axis)


def scan_starts(domain: DomainSpec, margin, starts, counts) -> list[np.ndarray]:
    """Admissible y-shift cells per axis for a sliding-window scan.

    For wrapping axes every shift 0..n-1 is admissible. For zero-extend axes a
    shift j is admissible when the shifted window stays inside the trusted
    region. Raises when any axis admits no shift at all.
    """
    shifts = []
    for i, ax in enumerate(domain.axes):
        if domain.axis_wraps(i):
            shifts.append(np.arange(ax.n))
            continue
        lo, hi = margin[i]
        j_lo = lo - starts[i]
        j_hi = ax.n - hi - counts[i] - starts[i]
        if j_hi < j_lo:
            raise ValueError(
                "empty admissible scan set: the window cannot sit inside the "
                f"trusted support on axis {i}")
        shifts.append(np.arange(j_lo, j_hi + 1))
    return shifts


def sliding_scan_sums(values: np.ndarray, domain: DomainSpec, margin,
                      starts, counts) -> tuple[np.ndarray, list[np.ndarray]]:
    """Window sums over every admissible shift of a window.

    Returns (sums, shifts): sums[j0, ..., jd] is the sum of values over the
    window displaced by shifts[i][ji] cells on axis i.
    """
    shifts = scan_starts(domain, margin, starts, counts)
    arr = values
    for i, ax in enumerate(domain.axes):
        if domain.axis_wraps(i):
            arr = np.roll(arr, -starts[i], axis=i)
            arr = _axis_sliding_sums(arr, i, counts[i], 0, 0, True, ax.n)
        else:
            j = shifts[i]
            arr = _axis_sliding_sums(arr, i, counts[i], int(j[0] + starts[i]),
                                     int(j[-1] + starts[i]), False, ax.n)
    return arr, shifts


def argmax_lex(arr: np.ndarray) -> tuple[int, ...]:
    """Index of the maximum, first in C order on ties."""
    return tuple(int(i) for i in np.unravel_index(int(np.argmax(arr)), arr.shape))
