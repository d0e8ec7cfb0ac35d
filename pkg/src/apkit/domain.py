"""Sampled abelian groups and their window geometry.

A domain is a finite grid standing in for a locally compact abelian group:
boxes in R^d sampled at cell centers, integer lattices, cyclic groups Z_N,
tori, and products of these. Haar measure is the product of per-axis cell
widths (counting measure on lattice axes). Windows are half-open boxes
aligned to cells; the boundary-measure and van Hove diagnostics below use
exact interval arithmetic on box endpoints, never sampling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

WRAP = "wrap"
ZERO_EXTEND = "zero-extend"

_AXIS_KINDS = ("real", "integer", "cyclic", "torus")

# JSON/CLI kind spellings accepted for domain records.
_KIND_ALIASES = {
    "real-grid": "real",
    "integer-lattice": "integer",
    "cyclic": "cyclic",
    "torus-grid": "torus",
    "real": "real",
    "integer": "integer",
    "torus": "torus",
}
_KIND_LABELS = {
    "real": "real-grid",
    "integer": "integer-lattice",
    "cyclic": "cyclic",
    "torus": "torus-grid",
}


class SupportExhausted(RuntimeError):
    """No window of the requested sequence fits the trusted support."""


@dataclass(frozen=True)
class Axis:
    """One grid axis: sample count n, cell width h, and a group-coordinate origin.

    Real and torus axes sample at cell centers origin + (i + 1/2) h, so
    singular integrands never land on a node. Integer and cyclic axes sample
    the lattice points origin + i with h fixed at 1 (counting measure).
    """

    kind: str
    n: int
    h: float = 1.0
    origin: float = 0.0

    def __post_init__(self):
        if self.kind not in _AXIS_KINDS:
            raise ValueError(f"unknown axis kind {self.kind!r}; expected one of {_AXIS_KINDS}")
        if self.n < 1:
            raise ValueError("axis sample count must be >= 1")
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError("cell width must be positive and finite")
        if self.kind in ("integer", "cyclic"):
            if self.h != 1.0:
                raise ValueError("integer and cyclic axes use counting measure; h must be 1")
            if abs(self.origin - round(self.origin)) > 1e-9:
                raise ValueError("integer and cyclic axes need an integral origin")
        if not math.isfinite(self.origin):
            raise ValueError("axis origin must be finite")

    @property
    def wraps(self) -> bool:
        return self.kind in ("cyclic", "torus")

    @property
    def extent(self) -> float:
        return self.n * self.h

    @property
    def lattice(self) -> bool:
        return self.kind in ("integer", "cyclic")

    def coordinates(self) -> np.ndarray:
        if self.lattice:
            return self.origin + np.arange(self.n, dtype=float)
        return self.origin + (np.arange(self.n, dtype=float) + 0.5) * self.h


@dataclass(frozen=True)
class DomainSpec:
    """A product of axes plus the out-of-range convention.

    boundary_mode "wrap" identifies the two ends of every axis (forced for
    cyclic and torus axes); "zero-extend" treats samples as a compactly
    supported slab of a non-compact group, and operations that shift data
    across the edge must flag the fabricated margin.
    """

    axes: tuple[Axis, ...]
    boundary_mode: str = ZERO_EXTEND

    def __post_init__(self):
        if not self.axes:
            raise ValueError("domain needs at least one axis")
        if self.boundary_mode not in (WRAP, ZERO_EXTEND):
            raise ValueError(f"boundary_mode must be {WRAP!r} or {ZERO_EXTEND!r}")
        if self.boundary_mode == ZERO_EXTEND and all(a.wraps for a in self.axes):
            # cyclic and torus axes force wrap
            object.__setattr__(self, "boundary_mode", WRAP)

    # -- structure ---------------------------------------------------------

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.n for a in self.axes)

    @property
    def cell_volume(self) -> float:
        v = 1.0
        for a in self.axes:
            v *= a.h
        return v

    @property
    def kind(self) -> str:
        kinds = {a.kind for a in self.axes}
        if len(kinds) == 1:
            return _KIND_LABELS[self.axes[0].kind]
        return "product"

    def axis_wraps(self, i: int) -> bool:
        return self.axes[i].wraps or self.boundary_mode == WRAP

    @property
    def all_wrap(self) -> bool:
        return all(self.axis_wraps(i) for i in range(self.ndim))

    def coordinates(self) -> list[np.ndarray]:
        return [a.coordinates() for a in self.axes]

    def point(self, t) -> tuple[float, ...]:
        """Normalize a scalar or sequence to a d-tuple of floats."""
        if np.isscalar(t):
            if self.ndim != 1:
                raise ValueError("scalar point on a multi-axis domain")
            return (float(t),)
        t = tuple(float(v) for v in t)
        if len(t) != self.ndim:
            raise ValueError(f"point has {len(t)} coordinates, domain has {self.ndim} axes")
        return t

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        uniform = self.kind != "product"
        axes = []
        for a in self.axes:
            rec = {"h": a.h, "n": a.n, "origin": a.origin}
            if not uniform:
                rec["kind"] = _KIND_LABELS[a.kind]
            axes.append(rec)
        return {"kind": self.kind, "axes": axes, "boundary_mode": self.boundary_mode}

    @staticmethod
    def from_json(rec: dict) -> "DomainSpec":
        kind = rec.get("kind")
        axes = []
        for ax in rec["axes"]:
            ax_kind = ax.get("kind", kind)
            if ax_kind not in _KIND_ALIASES and kind == "product":
                raise ValueError("product domains need a kind per axis")
            resolved = _KIND_ALIASES.get(ax_kind)
            if resolved is None:
                raise ValueError(f"unknown domain kind {ax_kind!r}")
            axes.append(Axis(resolved, int(ax["n"]), float(ax.get("h", 1.0)),
                             float(ax.get("origin", 0.0))))
        return DomainSpec(tuple(axes), rec.get("boundary_mode", ZERO_EXTEND))


# -- constructors ------------------------------------------------------------

def real_grid(n: int, h: float, origin: float = 0.0,
              boundary_mode: str = ZERO_EXTEND) -> DomainSpec:
    return DomainSpec((Axis("real", n, h, origin),), boundary_mode)


def integer_lattice(n: int, origin: float = 0.0) -> DomainSpec:
    return DomainSpec((Axis("integer", n, 1.0, origin),), ZERO_EXTEND)


def cyclic(n: int) -> DomainSpec:
    return DomainSpec((Axis("cyclic", n, 1.0, 0.0),), WRAP)


def torus_grid(n: int, h: float, origin: float = 0.0) -> DomainSpec:
    return DomainSpec((Axis("torus", n, h, origin),), WRAP)


def product(*specs: DomainSpec) -> DomainSpec:
    """Concatenate axes of several domains into one product domain."""
    axes = tuple(a for s in specs for a in s.axes)
    mode = WRAP if all(a.wraps for a in axes) else ZERO_EXTEND
    # an explicit wrap request on every factor keeps wrap
    if all(s.boundary_mode == WRAP for s in specs):
        mode = WRAP
    return DomainSpec(axes, mode)


# -- windows -----------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """A half-open box [offset, offset + side) per axis, cell aligned."""

    offset: tuple[float, ...]
    side_lengths: tuple[float, ...]

    def __post_init__(self):
        if len(self.offset) != len(self.side_lengths):
            raise ValueError("offset and side_lengths must have equal length")
        for s in self.side_lengths:
            if not (math.isfinite(s) and s > 0):
                raise ValueError("window side lengths must be positive and finite")
        for o in self.offset:
            if not math.isfinite(o):
                raise ValueError("window offset must be finite")

    @property
    def ndim(self) -> int:
        return len(self.offset)

    def shifted(self, t) -> "Window":
        t = tuple(float(v) for v in (t if not np.isscalar(t) else (t,)))
        if len(t) != self.ndim:
            raise ValueError("shift dimension mismatch")
        return Window(tuple(o + d for o, d in zip(self.offset, t)), self.side_lengths)

    def to_json(self) -> dict:
        return {"offset": list(self.offset), "side_lengths": list(self.side_lengths)}

    @staticmethod
    def from_json(rec: dict) -> "Window":
        return Window(tuple(float(v) for v in rec["offset"]),
                      tuple(float(v) for v in rec["side_lengths"]))


def window(offset, side_lengths) -> Window:
    """Window from scalars or sequences."""
    if np.isscalar(offset):
        offset = (offset,)
    if np.isscalar(side_lengths):
        side_lengths = (side_lengths,)
    return Window(tuple(float(v) for v in offset), tuple(float(v) for v in side_lengths))


def haar_measure(w: Window) -> float:
    """Haar measure of a box window: the exact product of its side lengths."""
    v = 1.0
    for s in w.side_lengths:
        v *= s
    return v


# -- K-boundary measure (exact box arithmetic) -------------------------------

def _arc_overlap(lo1: float, len1: float, lo2: float, len2: float, circ: float) -> float:
    """Measure of the intersection of two arcs on a circle of circumference circ."""
    len1 = min(len1, circ)
    len2 = min(len2, circ)
    if len1 >= circ:
        return len2
    if len2 >= circ:
        return len1
    d = (lo2 - lo1) % circ

    def seg(x):
        return max(0.0, min(len1, x + len2) - max(0.0, x))

    return seg(d) + seg(d - circ)


def _axis_boundary_terms(axis_wraps: bool, extent: float, a0: float, sa: float,
                         k0: float, sk: float) -> tuple[float, float, float, float]:
    """Per-axis lengths feeding the product formula for |boundary^K A|.

    Returns (dilated, dilated_overlap_with_A, side, erosion_overlap_with_A):
    lengths of closure(A+K), of closure(A+K) intersected with A, of A itself,
    and of the erosion {z : z + K within A} intersected with A.
    """
    if axis_wraps:
        if sa > extent + 1e-12:
            raise ValueError("window exceeds the group extent on a wrapping axis")
        sa = min(sa, extent)
        dil_len = min(extent, sa + sk)
        if sa >= extent:
            # the axis is fully covered: dilation and erosion are the whole circle
            return extent, extent, extent, extent
        dil_lo = a0 + k0
        dil_ov = _arc_overlap(a0, sa, dil_lo, dil_len, extent)
        ero_len = max(0.0, sa - sk)
        if ero_len == 0.0:
            ero_ov = 0.0
        else:
            ero_ov = _arc_overlap(a0, sa, a0 - k0, ero_len, extent)
        return dil_len, dil_ov, sa, ero_ov
    # flat axis: plain interval arithmetic
    dil_len = sa + sk
    dil_ov = max(0.0, sa + min(0.0, k0 + sk) - max(0.0, k0))
    ero_ov = max(0.0, sa - max(0.0, k0 + sk) - max(0.0, -k0))
    return dil_len, dil_ov, sa, ero_ov


def k_boundary_measure(a: Window, k: Window, domain: DomainSpec) -> float:
    """Haar measure of the K-boundary of box A, by closed-form box arithmetic.

    The K-boundary is (closure(A+K) minus A) union with (((G minus A) - K)
    intersected with closure(A)). For boxes both pieces are boxes-minus-boxes,
    so the measure is a difference of products of per-axis lengths; the two
    pieces meet only in the measure-zero topological boundary of A. Wrapping
    axes clamp all lengths to the circumference. No sampling is involved.
    """
    if a.ndim != domain.ndim or k.ndim != domain.ndim:
        raise ValueError("window dimension does not match the domain")
    dil = 1.0
    dil_ov = 1.0
    side = 1.0
    ero_ov = 1.0
    for i, ax in enumerate(domain.axes):
        d, dv, s, ev = _axis_boundary_terms(
            domain.axis_wraps(i), ax.extent,
            a.offset[i], a.side_lengths[i], k.offset[i], k.side_lengths[i])
        dil *= d
        dil_ov *= dv
        side *= s
        ero_ov *= ev
    grown = dil - dil_ov          # closure(A+K) \ A
    shaved = side - ero_ov        # ((G\A) - K) intersected with closure(A)
    return grown + shaved


# -- van Hove sequences -------------------------------------------------------

_VH_RULES = ("centered", "right", "left", "slab", "full")


@dataclass(frozen=True)
class VanHoveSequence:
    """A rule generating nested averaging windows A_1, A_2, ... on a domain.

    Rules:
      centered  symmetric boxes around 0; side base_side * n per axis, snapped
                to an even cell count on real/torus axes and an odd point count
                on lattice axes so the sample set is exactly negation invariant
      right     boxes [0, base_side * n) per axis
      left      boxes [-base_side * n, 0) per axis
      slab      first axis grows as [0, base_side * n); other axes stay fixed
                at [0, base_side) -- deliberately *not* van Hove
      full      the whole domain for every n (natural on cyclic groups)
    """

    domain: DomainSpec
    rule: str = "centered"
    base_side: tuple[float, ...] | float = 1.0
    n_max: int = 100

    def __post_init__(self):
        if self.rule not in _VH_RULES:
            raise ValueError(f"unknown van Hove rule {self.rule!r}; expected one of {_VH_RULES}")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        base = self.base_side
        if np.isscalar(base):
            base = (float(base),) * self.domain.ndim
        else:
            base = tuple(float(b) for b in base)
        if len(base) != self.domain.ndim:
            raise ValueError("base_side length must match the domain dimension")
        for b in base:
            if not (math.isfinite(b) and b > 0):
                raise ValueError("base_side entries must be positive")
        object.__setattr__(self, "base_side", base)

    @property
    def symmetric(self) -> bool:
        """True when -A_n = A_n as sample sets (centered and full rules)."""
        return self.rule in ("centered", "full")

    def _centered_axis(self, ax: Axis, target: float) -> tuple[float, float]:
        if ax.lattice:
            m = max(0, int(math.floor(target / 2.0 + 1e-12)))
            # points {-m, ..., m}: odd count, exactly negation closed
            return -float(m), float(2 * m + 1)
        cells = max(2, 2 * int(round(target / (2.0 * ax.h))))
        side = cells * ax.h
        return -side / 2.0, side

    def window(self, n: int) -> Window:
        if n < 1:
            raise ValueError("window index must be >= 1")
        offs = []
        sides = []
        for i, ax in enumerate(self.domain.axes):
            b = self.base_side[i]
            if self.rule == "full":
                offs.append(ax.origin)
                sides.append(ax.extent)
            elif self.rule == "centered":
                o, s = self._centered_axis(ax, b * n)
                offs.append(o)
                sides.append(s)
            elif self.rule == "right":
                offs.append(0.0)
                sides.append(b * n)
            elif self.rule == "left":
                offs.append(-b * n)
                sides.append(b * n)
            else:  # slab
                grow = b * n if i == 0 else b
                offs.append(0.0)
                sides.append(grow)
        return Window(tuple(offs), tuple(sides))

    def to_json(self) -> dict:
        return {"rule": self.rule, "base_side": list(self.base_side),
                "n_max": self.n_max, "domain": self.domain.to_json()}


@dataclass(frozen=True)
class VanHoveReport:
    """Boundary-to-bulk ratio table for a window sequence against a probe K."""

    k: Window
    tolerance: float
    entries: tuple[tuple[int, float], ...]
    verdict: bool

    def to_json(self) -> dict:
        return {"k": self.k.to_json(), "tolerance": self.tolerance,
                "entries": [[n, r] for n, r in self.entries], "verdict": self.verdict}


def van_hove_report(seq: VanHoveSequence, k: Window, n_max: int | None = None,
                    tolerance: float = 0.05) -> VanHoveReport:
    """Tabulate |boundary^K A_n| / |A_n| and judge the terminal ratio.

    verdict is True when the ratio at the largest index is below tolerance.
    A slab sequence keeps a fixed transverse edge, so its ratio stays bounded
    away from zero and the verdict comes out False; the full-group rule on a
    cyclic domain gives exactly zero.
    """
    if n_max is None:
        n_max = seq.n_max
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    entries = []
    for n in range(1, n_max + 1):
        a = seq.window(n)
        ratio = k_boundary_measure(a, k, seq.domain) / haar_measure(a)
        entries.append((n, ratio))
    verdict = bool(entries[-1][1] < tolerance)
    return VanHoveReport(k, tolerance, tuple(entries), verdict)
