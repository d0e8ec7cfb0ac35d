"""Sampled functions, characters, trigonometric polynomials, atomic measures.

GridFunction stores complex samples on a DomainSpec together with a
contaminated-margin record: on zero-extend domains, translations fabricate
zeros at the incoming edge, and every cell whose value depends on fabricated
data is counted into a per-axis (lo, hi) margin. Norm and mean scans exclude
contaminated cells. On wrapping domains translation is an exact group action
and margins never grow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import DomainSpec, Window

_ROOT_TABLES: dict[int, np.ndarray] = {}


def _root_table(n: int) -> np.ndarray:
    """exp(2 pi i k / n) for k in range(n); cached."""
    tab = _ROOT_TABLES.get(n)
    if tab is None:
        tab = np.exp(2j * np.pi * np.arange(n) / n)
        tab.setflags(write=False)
        _ROOT_TABLES[n] = tab
    return tab


def _zero_margin(ndim: int) -> tuple[tuple[int, int], ...]:
    return tuple((0, 0) for _ in range(ndim))


@dataclass
class GridFunction:
    """Complex samples on a domain, with provenance and margin metadata.

    values must be finite everywhere (NaN/Inf are rejected at construction).
    margin[i] = (lo, hi) counts contaminated cells at the two ends of axis i;
    the trusted region is the complement. snap_distance accumulates the worst
    grid-snapping a translation has applied to this data.
    """

    domain: DomainSpec
    values: np.ndarray
    margin: tuple[tuple[int, int], ...] | None = None
    provenance: str = ""
    snap_distance: float = 0.0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != self.domain.shape:
            raise ValueError(f"values shape {vals.shape} does not match domain shape {self.domain.shape}")
        if not np.all(np.isfinite(vals.real)) or not np.all(np.isfinite(vals.imag)):
            raise ValueError("grid function values must be finite (no NaN/Inf)")
        self.values = vals
        if self.margin is None:
            self.margin = _zero_margin(self.domain.ndim)
        else:
            m = []
            for (lo, hi), n in zip(self.margin, self.domain.shape):
                lo = int(min(max(lo, 0), n))
                hi = int(min(max(hi, 0), n))
                m.append((lo, hi))
            self.margin = tuple(m)

    # -- helpers -------------------------------------------------------------

    def replace(self, values=None, margin=None, provenance=None,
                snap_distance=None, info=None) -> "GridFunction":
        return GridFunction(
            self.domain,
            self.values if values is None else values,
            self.margin if margin is None else margin,
            self.provenance if provenance is None else provenance,
            self.snap_distance if snap_distance is None else snap_distance,
            dict(self.info) if info is None else info,
        )

    def trusted_slices(self) -> tuple[slice, ...]:
        return tuple(slice(lo, n - hi) for (lo, hi), n in zip(self.margin, self.domain.shape))

    def trusted_values(self) -> np.ndarray:
        return self.values[self.trusted_slices()]

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0.0))


def grid_function(domain: DomainSpec, values, provenance: str = "") -> GridFunction:
    return GridFunction(domain, values, provenance=provenance)


def zeros(domain: DomainSpec, provenance: str = "zero") -> GridFunction:
    return GridFunction(domain, np.zeros(domain.shape, dtype=np.complex128),
                        provenance=provenance)


def constant(domain: DomainSpec, value, provenance: str = "constant") -> GridFunction:
    return GridFunction(domain, np.full(domain.shape, complex(value)), provenance=provenance)


def from_callable(domain: DomainSpec, fn, provenance: str = "callable") -> GridFunction:
    """Sample fn on the coordinate mesh (fn receives one array per axis)."""
    mesh = np.meshgrid(*domain.coordinates(), indexing="ij") if domain.ndim > 1 \
        else [domain.coordinates()[0]]
    return GridFunction(domain, np.asarray(fn(*mesh), dtype=np.complex128),
                        provenance=provenance)


# -- characters ---------------------------------------------------------------

@dataclass(frozen=True)
class Character:
    """A character of the sampled group, one frequency per axis.

    Cyclic axes take integer frequencies (reduced mod N at evaluation, via an
    exact root-of-unity index table, so the homomorphism holds at index
    level). Integer axes take frequencies in the dual circle, reduced mod 1.
    Real and torus axes take real frequencies: x maps to exp(2 pi i k x).
    """

    freq: tuple[float, ...]

    def __post_init__(self):
        for k in self.freq:
            if not math.isfinite(k):
                raise ValueError("character frequency must be finite")

    @property
    def ndim(self) -> int:
        return len(self.freq)

    def canonical(self, domain: DomainSpec) -> "Character":
        out = []
        for k, ax in zip(self.freq, domain.axes):
            if ax.kind == "cyclic":
                ki = round(k)
                if abs(k - ki) > 1e-9:
                    raise ValueError("cyclic axes carry integral frequencies")
                out.append(float(ki % ax.n))
            elif ax.kind == "integer":
                out.append(k % 1.0)
            else:
                out.append(float(k))
        return Character(tuple(out))

    def axis_values(self, domain: DomainSpec, i: int) -> np.ndarray:
        ax = domain.axes[i]
        k = self.freq[i]
        if ax.kind == "cyclic":
            ki = round(k)
            if abs(k - ki) > 1e-9:
                raise ValueError("cyclic axes carry integral frequencies")
            idx = (ki * np.arange(ax.n)) % ax.n
            return _root_table(ax.n)[idx]
        return np.exp(2j * np.pi * k * ax.coordinates())

    def values(self, domain: DomainSpec) -> np.ndarray:
        if len(self.freq) != domain.ndim:
            raise ValueError("character dimension does not match the domain")
        out = self.axis_values(domain, 0)
        for i in range(1, domain.ndim):
            nxt = self.axis_values(domain, i)
            out = np.multiply.outer(out, nxt)
        return out

    def at(self, domain: DomainSpec, t) -> complex:
        """Value at an arbitrary group point (not necessarily a sample)."""
        t = domain.point(t)
        v = 1.0 + 0.0j
        for k, ax, c in zip(self.freq, domain.axes, t):
            if ax.kind == "cyclic":
                ki = round(k)
                ci = round(c)
                v *= _root_table(ax.n)[(ki * ci) % ax.n]
            else:
                v *= np.exp(2j * np.pi * k * c)
        return complex(v)

    def sample(self, domain: DomainSpec, provenance: str = "character") -> GridFunction:
        return GridFunction(domain, self.values(domain), provenance=provenance)

    def to_json(self) -> dict:
        return {"freq": list(self.freq)}


def character(*freq) -> Character:
    if len(freq) == 1 and not np.isscalar(freq[0]):
        freq = tuple(freq[0])
    return Character(tuple(float(k) for k in freq))


# -- trigonometric polynomials -------------------------------------------------

@dataclass(frozen=True)
class TrigPolynomial:
    """A finite sum of coefficient * character terms.

    Terms are keyed by exact frequency tuples: duplicates merge by summing
    coefficients at construction, and terms are stored sorted by frequency so
    iteration and serialization are deterministic. Distinctness is syntactic;
    cyclic aliasing (k vs k + N) resolves at evaluation time.
    """

    terms: tuple[tuple[Character, complex], ...]

    def __post_init__(self):
        merged: dict[tuple[float, ...], complex] = {}
        for chi, c in self.terms:
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("trig polynomial coefficients must be finite")
            merged[chi.freq] = merged.get(chi.freq, 0.0 + 0.0j) + c
        object.__setattr__(
            self, "terms",
            tuple((Character(f), merged[f]) for f in sorted(merged)))

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def coefficient(self, chi: Character) -> complex:
        for c2, v in self.terms:
            if c2.freq == chi.freq:
                return v
        return 0.0 + 0.0j

    def sup_bound(self) -> float:
        """Coefficient-sum bound on the sup norm."""
        return float(sum(abs(c) for _, c in self.terms))

    def to_json(self) -> dict:
        return {"terms": [{"freq": list(chi.freq), "re": c.real, "im": c.imag}
                          for chi, c in self.terms]}

    @staticmethod
    def from_json(rec: dict) -> "TrigPolynomial":
        return TrigPolynomial(tuple(
            (Character(tuple(float(k) for k in t["freq"])),
             complex(float(t["re"]), float(t["im"])))
            for t in rec["terms"]))


def trig_polynomial(pairs) -> TrigPolynomial:
    """Build from (freq, coefficient) pairs; freq may be a scalar, a tuple,
    or an already-built Character."""
    terms = []
    for freq, c in pairs:
        if isinstance(freq, Character):
            chi = freq
        elif np.isscalar(freq):
            chi = character(freq)
        else:
            chi = character(*freq)
        terms.append((chi, complex(c)))
    return TrigPolynomial(tuple(terms))


def eval_trig_poly(p: TrigPolynomial, domain: DomainSpec) -> GridFunction:
    """Sum coefficient * character over the sample mesh; empty sum is zero."""
    vals = np.zeros(domain.shape, dtype=np.complex128)
    for chi, c in p.terms:
        vals += c * chi.values(domain)
    return GridFunction(domain, vals, provenance="trig-poly")


# -- atomic measures ------------------------------------------------------------

@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many weighted point masses sum w_i * delta_{y_i}."""

    atoms: tuple[tuple[tuple[float, ...], complex], ...]

    def __post_init__(self):
        norm = []
        for pos, w in self.atoms:
            pos = tuple(float(x) for x in pos)
            w = complex(w)
            for x in pos:
                if not math.isfinite(x):
                    raise ValueError("atom positions must be finite")
            if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                raise ValueError("atom weights must be finite")
            norm.append((pos, w))
        object.__setattr__(self, "atoms", tuple(norm))

    @property
    def total_variation(self) -> float:
        return float(sum(abs(w) for _, w in self.atoms))

    def to_json(self) -> dict:
        return {"atoms": [{"position": list(p), "re": w.real, "im": w.imag}
                          for p, w in self.atoms]}

    @staticmethod
    def from_json(rec: dict) -> "AtomicMeasure":
        return AtomicMeasure(tuple(
            (tuple(float(x) for x in a["position"]), complex(float(a["re"]), float(a["im"])))
            for a in rec["atoms"]))


def atomic_measure(pairs) -> AtomicMeasure:
    atoms = []
    for pos, w in pairs:
        if np.isscalar(pos):
            pos = (pos,)
        atoms.append((tuple(float(x) for x in pos), complex(w)))
    return AtomicMeasure(tuple(atoms))


# -- translation -----------------------------------------------------------------

def _axis_shift_cells(ax, t: float) -> tuple[int, float]:
    steps = t / ax.h
    shift = int(math.floor(steps + 0.5))
    return shift, abs(t - shift * ax.h)


def translate(f: GridFunction, t) -> GridFunction:
    """T_t f with (T_t f)(x) = f(x - t), snapped to the cell lattice.

    Wrapping axes roll exactly (group action); zero-extend axes shift and pad
    with zeros, growing the contaminated margin by the shift at the incoming
    edge and shrinking it at the outgoing edge. The snap distance |t - snap(t)|
    is recorded on the result. Translating past the sampled support of a
    zero-extend axis is an error.
    """
    t = f.domain.point(t)
    vals = f.values
    margin = list(f.margin)
    snap = f.snap_distance
    for i, ax in enumerate(f.domain.axes):
        shift, d = _axis_shift_cells(ax, t[i])
        snap = max(snap, d)
        if shift == 0:
            continue
        if f.domain.axis_wraps(i):
            vals = np.roll(vals, shift, axis=i)
            continue
        n = ax.n
        if abs(shift) >= n:
            raise ValueError("translation escapes the sampled support on a zero-extend axis")
        out = np.zeros_like(vals)
        src = [slice(None)] * vals.ndim
        dst = [slice(None)] * vals.ndim
        if shift > 0:
            src[i] = slice(0, n - shift)
            dst[i] = slice(shift, n)
        else:
            src[i] = slice(-shift, n)
            dst[i] = slice(0, n + shift)
        out[tuple(dst)] = vals[tuple(src)]
        vals = out
        lo, hi = margin[i]
        if shift > 0:
            margin[i] = (min(n, lo + shift), max(0, hi - shift))
        else:
            margin[i] = (max(0, lo + shift), min(n, hi - shift))
    return GridFunction(f.domain, vals, tuple(margin), f.provenance, snap, dict(f.info))


# -- pointwise algebra -------------------------------------------------------------

def _require_same_domain(f: GridFunction, g: GridFunction):
    if f.domain != g.domain:
        raise ValueError("grid functions live on different domains")


def _merge_margin(f: GridFunction, g: GridFunction) -> tuple[tuple[int, int], ...]:
    return tuple((max(a, c), max(b, d)) for (a, b), (c, d) in zip(f.margin, g.margin))


def add(f: GridFunction, g: GridFunction) -> GridFunction:
    _require_same_domain(f, g)
    return GridFunction(f.domain, f.values + g.values, _merge_margin(f, g),
                        snap_distance=max(f.snap_distance, g.snap_distance))


def sub(f: GridFunction, g: GridFunction) -> GridFunction:
    _require_same_domain(f, g)
    return GridFunction(f.domain, f.values - g.values, _merge_margin(f, g),
                        snap_distance=max(f.snap_distance, g.snap_distance))


def scale(f: GridFunction, c) -> GridFunction:
    return f.replace(values=f.values * complex(c))


def mul(f: GridFunction, g: GridFunction) -> GridFunction:
    _require_same_domain(f, g)
    return GridFunction(f.domain, f.values * g.values, _merge_margin(f, g),
                        snap_distance=max(f.snap_distance, g.snap_distance))


def magnitude(f: GridFunction) -> GridFunction:
    return f.replace(values=np.abs(f.values).astype(np.complex128))


def conjugate(f: GridFunction) -> GridFunction:
    return f.replace(values=np.conj(f.values))


def _reflect_index(ax, wraps: bool) -> np.ndarray:
    """Per-axis index map realizing x -> -x, exact or an error."""
    n = ax.n
    if ax.kind == "cyclic":
        if ax.origin != 0.0:
            raise ValueError("reflection needs origin 0 on cyclic axes")
        return (-np.arange(n)) % n
    if wraps:
        # centers o + (i+1/2)h on a circle of extent nh: negation is exact
        # when 2*origin is a multiple of h
        two_o = 2.0 * ax.origin / ax.h
        if abs(two_o - round(two_o)) > 1e-9:
            raise ValueError("grid is not closed under negation on this torus axis")
        return (-np.arange(n) - 1 - int(round(two_o))) % n
    if ax.kind == "integer":
        j = -2.0 * ax.origin - np.arange(n)
        ji = np.round(j).astype(int)
        if np.any(np.abs(j - ji) > 1e-9) or ji.min() < 0 or ji.max() >= n:
            raise ValueError("integer axis is not closed under negation")
        return ji
    # flat real axis: need the symmetric layout origin = -n h / 2
    two_o = 2.0 * ax.origin / ax.h
    if abs(two_o + n) > 1e-9:
        raise ValueError("real axis is not symmetric about 0; reflection undefined")
    return n - 1 - np.arange(n)


def reflect(f: GridFunction) -> GridFunction:
    """f(-x), by exact reindexing through the group inverse.

    Requires every axis to be closed under negation: cyclic axes with origin
    0, torus axes whose center set is negation invariant, and flat axes laid
    out symmetrically around 0. Otherwise the sampled reflection does not
    exist and a ValueError explains which layout is needed.
    """
    vals = f.values
    margin = []
    for i, ax in enumerate(f.domain.axes):
        idx = _reflect_index(ax, f.domain.axis_wraps(i))
        vals = np.take(vals, idx, axis=i)
        lo, hi = f.margin[i]
        margin.append((hi, lo) if not f.domain.axis_wraps(i) else (lo, hi))
    return GridFunction(f.domain, vals, tuple(margin), f.provenance,
                        f.snap_distance, dict(f.info))


def involution(f: GridFunction) -> GridFunction:
    """conj(f(-x)), the adjoint appearing in autocorrelations."""
    return conjugate(reflect(f))


_POINTWISE = {}


def pointwise(op: str, *args) -> GridFunction:
    """Dispatch by name: add, sub, scale, mul, abs, conj, reflect, involution."""
    try:
        fn = _POINTWISE[op]
    except KeyError:
        raise ValueError(f"unknown pointwise op {op!r}; expected one of {sorted(_POINTWISE)}")
    return fn(*args)


_POINTWISE.update({
    "add": add, "sub": sub, "scale": scale, "mul": mul,
    "abs": magnitude, "conj": conjugate, "reflect": reflect, "involution": involution,
})
