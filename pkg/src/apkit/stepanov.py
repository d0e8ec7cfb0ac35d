"""Stepanov norms and almost-period machinery.

The S^p norm over a window K is the sup over window positions y of the p-mean
of |f| on y+K, with the mean taken against Haar measure by the midpoint rule.
On wrapping domains y ranges over the whole group; on zero-extend domains y
ranges over every position whose window sits inside the trusted (uncontaminated)
region, and an empty admissible set is an error rather than a silent zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _engine
from .domain import DomainSpec, Window, haar_measure, window
from .signals import Character, GridFunction, TrigPolynomial, sub, translate
from .signals import _root_table  # root-of-unity cache shared with characters


def _validate_p(p: float) -> float:
    p = float(p)
    if not (math.isfinite(p) and p >= 1.0):
        raise ValueError("exponent p must satisfy p >= 1")
    return p


def _weighted(values: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(values)
    if p == 1.0:
        return a
    if p == 2.0:
        return a * a
    return a ** p


@dataclass(frozen=True)
class NormResult:
    """A Stepanov norm value together with the position realizing the sup."""

    value: float
    argmax_y: tuple[float, ...]
    window: Window
    p: float

    def __float__(self) -> float:
        return self.value

    def to_json(self) -> dict:
        return {"value": self.value, "argmax_y": list(self.argmax_y),
                "window": self.window.to_json(), "p": self.p}


def window_lp_mean(f: GridFunction, k: Window, y, p: float) -> float:
    """((1/|K|) integral over y+K of |f|^p)^(1/p) by the midpoint rule.

    The mean normalizes by the snapped window's own measure, so constants are
    reproduced exactly. The shifted window must sit inside the trusted region
    on zero-extend axes.
    """
    p = _validate_p(p)
    y = f.domain.point(y)
    starts, counts, _ = _engine.resolve_window(f.domain, k.shifted(y))
    _engine.check_window_fits(f.domain, f.margin, starts, counts)
    total = _engine.box_sum(_weighted(f.values, p), f.domain, starts, counts)
    ncells = 1
    for c in counts:
        ncells *= c
    return float(np.real(total) / ncells) ** (1.0 / p)


def stepanov_norm(f: GridFunction, k: Window, p: float) -> NormResult:
    """sup over window positions of the windowed p-mean, with its argmax.

    Ties break toward the lexicographically smallest position. On a cyclic
    domain with K the full group this is the plain normalized l^p norm.
    """
    p = _validate_p(p)
    starts, counts, _ = _engine.resolve_window(f.domain, k)
    sums, shifts = _engine.sliding_scan_sums(_weighted(f.values, p), f.domain,
                                             f.margin, starts, counts)
    sums = np.real(sums)
    best = _engine.argmax_lex(sums)
    ncells = 1
    for c in counts:
        ncells *= c
    value = float(sums[best] / ncells) ** (1.0 / p)
    argmax = tuple(float(shifts[i][best[i]] * ax.h)
                   for i, ax in enumerate(f.domain.axes))
    return NormResult(value, argmax, k, p)


def _sup_distance(f: GridFunction, g: GridFunction, k: Window, p: float) -> float:
    return stepanov_norm(sub(f, g), k, p).value


# -- norm equivalence under window change ---------------------------------------

@dataclass(frozen=True)
class EquivalenceBounds:
    """Constants with c1 ||f||_{S,K2} <= ||f||_{S,K1} <= c2 ||f||_{S,K2}."""

    c1: float
    c2: float
    n_cover: int
    reverse_cover: int

    def to_json(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "n_cover": self.n_cover,
                "reverse_cover": self.reverse_cover}


def _cover_count(big: Window, small: Window) -> int:
    """Axis-aligned translates of `small` needed to cover `big` (box covering)."""
    n = 1
    for s_big, s_small in zip(big.side_lengths, small.side_lengths):
        # guard against 2.0000000000000004 -> 3
        n *= int(math.ceil(s_big / s_small - 1e-9))
    return n


def equivalence_bounds(k1: Window, k2: Window, p: float) -> EquivalenceBounds:
    """Two-sided comparison constants between S^p norms over K1 and K2.

    Covering K1 by n translates of K2 bounds every K1-mean by n * |K2|/|K1|
    many K2-means, giving the upper constant c2 = (n |K2|/|K1|)^(1/p); the
    lower constant comes from the same covering argument with the roles of the
    windows swapped. Both coverings are reported.
    """
    p = _validate_p(p)
    if k1.ndim != k2.ndim:
        raise ValueError("windows have different dimensions")
    n_cover = _cover_count(k1, k2)
    m_cover = _cover_count(k2, k1)
    t1 = haar_measure(k1)
    t2 = haar_measure(k2)
    c2 = (n_cover * t2 / t1) ** (1.0 / p)
    c1 = (m_cover * t1 / t2) ** (-1.0 / p)
    return EquivalenceBounds(c1, c2, n_cover, m_cover)


# -- almost-period scans ----------------------------------------------------------

@dataclass(frozen=True)
class AlmostPeriodReport:
    """Result of an exhaustive translate scan against an epsilon threshold.

    periods holds (t, distance) for every reported almost period. max_gap is
    the largest hole in the reported set, measured between consecutive periods
    and against both ends of the scan range; with no periods it is the whole
    range. relatively_dense_verdict compares max_gap to gap_bound when a bound
    is given (None otherwise). For equi-Weyl scans uniform_n is the smallest
    index valid simultaneously for every reported period and per_t_min_n keeps
    the per-period minima as diagnostics.
    """

    epsilon: float
    norm_kind: str
    p: float
    window: Window
    scan_range: tuple[float, float]
    stride: float
    periods: tuple[tuple[float, float], ...]
    max_gap: float
    gap_bound: float | None
    relatively_dense_verdict: bool | None
    uniform_n: int | None = None
    per_t_min_n: tuple[tuple[float, int], ...] | None = None

    def to_json(self) -> dict:
        rec = {
            "epsilon": self.epsilon,
            "norm_kind": self.norm_kind,
            "p": self.p,
            "window": self.window.to_json(),
            "scan_range": list(self.scan_range),
            "stride": self.stride,
            "periods": [[t, d] for t, d in self.periods],
            "max_gap": self.max_gap,
            "gap_bound": self.gap_bound,
            "relatively_dense_verdict": self.relatively_dense_verdict,
        }
        if self.uniform_n is not None:
            rec["uniform_n"] = self.uniform_n
        if self.per_t_min_n is not None:
            rec["per_t_min_n"] = [[t, n] for t, n in self.per_t_min_n]
        return rec


def scan_candidates(domain: DomainSpec, scan_range, stride: float | None) -> tuple[np.ndarray, float]:
    """Cell-aligned translate candidates lo..hi with an optional stride.

    The stride snaps to a whole number of cells (default one cell). Only
    one-axis domains are supported: gap statistics need an ordering.
    """
    if domain.ndim != 1:
        raise ValueError("translate scans are defined on one-axis domains")
    h = domain.axes[0].h
    lo, hi = (float(scan_range[0]), float(scan_range[1]))
    if hi < lo:
        raise ValueError("scan range is empty")
    step_cells = 1 if stride is None else max(1, int(round(stride / h)))
    step = step_cells * h
    m_lo = int(math.ceil(lo / h - 1e-9))
    m_hi = int(math.floor(hi / h + 1e-9))
    if m_hi < m_lo:
        raise ValueError("scan range contains no cell-aligned translate")
    ms = np.arange(m_lo, m_hi + 1, step_cells)
    return ms * h, step


def _gap_statistics(periods: list[float], lo: float, hi: float) -> float:
    if not periods:
        return hi - lo
    ts = sorted(periods)
    gaps = [ts[0] - lo, hi - ts[-1]]
    gaps.extend(b - a for a, b in zip(ts, ts[1:]))
    return max(gaps)


def almost_period_scan(f: GridFunction, k: Window, p: float, epsilon: float,
                       scan_range, stride: float | None = None,
                       gap_bound: float | None = None) -> AlmostPeriodReport:
    """Report every scanned t with ||f - T_t f||_{S^p over K} < epsilon.

    The scan is exhaustive over cell-aligned candidates in scan_range (at the
    given stride). Each reported period re-satisfies the defining inequality by
    construction since the recorded distance is the computed norm itself.
    """
    p = _validate_p(p)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    ts, step = scan_candidates(f.domain, scan_range, stride)
    periods = []
    for t in ts:
        d = _sup_distance(f, translate(f, t), k, p)
        if d < epsilon:
            periods.append((float(t), d))
    max_gap = _gap_statistics([t for t, _ in periods], float(ts[0]), float(ts[-1]))
    verdict = None if gap_bound is None else bool(max_gap <= gap_bound)
    return AlmostPeriodReport(
        epsilon=float(epsilon), norm_kind="stepanov", p=p, window=k,
        scan_range=(float(ts[0]), float(ts[-1])), stride=step,
        periods=tuple(periods), max_gap=max_gap, gap_bound=gap_bound,
        relatively_dense_verdict=verdict)


# -- truncation and mollification ---------------------------------------------------

def truncate(f: GridFunction, level: float) -> GridFunction:
    """Radial clip at |f| = level: f where |f| <= level, else level * f/|f|.

    A samplewise contraction: it never increases |f(x) - g(x)| between two
    functions clipped at the same level.
    """
    level = float(level)
    if not (math.isfinite(level) and level > 0):
        raise ValueError("truncation level must be positive")
    a = np.abs(f.values)
    over = a > level
    out = f.values.copy()
    out[over] = f.values[over] * (level / a[over])
    return f.replace(values=out)


def _mollifier_radii(domain: DomainSpec, eta) -> tuple[int, ...]:
    if np.isscalar(eta):
        eta = (float(eta),) * domain.ndim
    else:
        eta = tuple(float(e) for e in eta)
    radii = []
    for e, ax in zip(eta, domain.axes):
        if e < ax.h - 1e-12:
            raise ValueError("mollifier radius is below the grid resolution")
        radii.append(int(round(e / ax.h)))
    return tuple(radii)


def mollify(f: GridFunction, eta) -> GridFunction:
    """Centered moving average over a box of half-width eta per axis.

    The discrete window spans 2r+1 cells with r = round(eta/h), i.e. an
    effective half-width of (2r+1)h/2; symmetric by construction. Wrapping
    axes average circularly; zero-extend axes average against fabricated
    zeros, and the contaminated margin grows by r on each side.
    """
    radii = _mollifier_radii(f.domain, eta)
    vals = f.values
    margin = list(f.margin)
    for i, ax in enumerate(f.domain.axes):
        r = radii[i]
        if r == 0:
            continue
        m = 2 * r + 1
        a = np.moveaxis(vals, i, -1)
        if f.domain.axis_wraps(i):
            ext = np.concatenate([a[..., -r:], a, a[..., :r]], axis=-1)
        else:
            z = np.zeros(a.shape[:-1] + (r,), dtype=a.dtype)
            ext = np.concatenate([z, a, z], axis=-1)
            lo, hi = margin[i]
            margin[i] = (min(ax.n, lo + r), min(ax.n, hi + r))
        if ext.size * m <= _engine.DIRECT_SUM_LIMIT:
            sums = np.lib.stride_tricks.sliding_window_view(ext, m, axis=-1).sum(axis=-1)
        else:
            c = np.cumsum(ext, axis=-1)
            zeros = np.zeros(ext.shape[:-1] + (1,), dtype=ext.dtype)
            c = np.concatenate([zeros, c], axis=-1)
            sums = c[..., m:] - c[..., :-m]
        vals = np.moveaxis(sums / m, -1, i)
    return GridFunction(f.domain, vals, tuple(margin), f.provenance,
                        f.snap_distance, dict(f.info))


def mollifier_attenuation(domain: DomainSpec, chi: Character, eta) -> complex:
    """Exact factor by which mollify(eta) scales the sampled character chi.

    The moving average multiplies each character by the discrete mean of its
    values over the window offsets (a Dirichlet-kernel ratio per axis, the
    sampled form of the sinc attenuation of a box mollifier).
    """
    radii = _mollifier_radii(domain, eta)
    att = 1.0 + 0.0j
    for i, ax in enumerate(domain.axes):
        r = radii[i]
        offs = np.arange(-r, r + 1)
        if ax.kind == "cyclic":
            k = int(round(chi.freq[i]))
            vals = _root_table(ax.n)[(k * offs) % ax.n]
        else:
            vals = np.exp(2j * np.pi * chi.freq[i] * offs * ax.h)
        att *= vals.mean()
    return complex(att)


# -- epsilon nets over translate orbits ------------------------------------------------

@dataclass(frozen=True)
class EpsNetCertificate:
    """A greedy epsilon net over a set of translates, plus its re-check.

    centers lists the chosen translate parameters. worst_uncovered_distance is
    the exact max over candidates of the distance to the nearest center, from
    a full second pass over all pairs (the verifiable certificate), and
    coverage_verdict states whether it stays below epsilon.
    """

    epsilon: float
    p: float
    window: Window
    centers: tuple[tuple[float, ...], ...]
    candidate_count: int
    worst_uncovered_distance: float
    coverage_verdict: bool

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "p": self.p, "window": self.window.to_json(),
                "centers": [list(c) for c in self.centers],
                "candidate_count": self.candidate_count,
                "worst_uncovered_distance": self.worst_uncovered_distance,
                "coverage_verdict": self.coverage_verdict}


def orbit_eps_net(f: GridFunction, k: Window, p: float, epsilon: float,
                  translate_set) -> EpsNetCertificate:
    """Greedy epsilon net over {T_t f : t in translate_set} in the S^p metric.

    A candidate becomes a center when no existing center is within epsilon.
    The certificate then re-checks coverage by recomputing, for every
    candidate, its distance to the nearest center.
    """
    p = _validate_p(p)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    cands = [f.domain.point(t) for t in translate_set]
    if not cands:
        raise ValueError("translate set is empty")
    centers: list[tuple[tuple[float, ...], GridFunction]] = []
    for t in cands:
        ft = translate(f, t)
        hit = False
        for _, fc in centers:
            if _sup_distance(ft, fc, k, p) < epsilon:
                hit = True
                break
        if not hit:
            centers.append((t, ft))
    worst = 0.0
    for t in cands:
        ft = translate(f, t)
        dmin = min(_sup_distance(ft, fc, k, p) for _, fc in centers)
        worst = max(worst, dmin)
    return EpsNetCertificate(
        epsilon=float(epsilon), p=p, window=k,
        centers=tuple(t for t, _ in centers), candidate_count=len(cands),
        worst_uncovered_distance=worst, coverage_verdict=bool(worst < epsilon))


# -- Bohr approximation -----------------------------------------------------------------

@dataclass(frozen=True)
class BohrApproximation:
    """A trig-polynomial approximant with its achieved S^p distance."""

    poly: TrigPolynomial
    distance: float
    achieved: bool
    eta: float | None

    def to_json(self) -> dict:
        return {"poly": self.poly.to_json(), "distance": self.distance,
                "achieved": self.achieved, "eta": self.eta}


def bohr_approximate(f: GridFunction, k: Window, p: float, epsilon: float,
                     seq, freq_grid, eta: float | None = None) -> BohrApproximation:
    """Project onto a frequency grid and verify the S^p distance.

    Pipeline: optional box mollification (the smoothing step; each candidate
    frequency is then deconvolved by its exact attenuation factor so that
    frequencies already present are recovered unbiased), Fourier-Bohr
    projection via group averaging along the window sequence, then a norm
    check of f minus the synthesized polynomial. Coefficients whose combined
    absolute sum stays below epsilon/4 are dropped smallest-first, so the zero
    function yields the empty polynomial. Soft-fails by returning the best
    polynomial with achieved=False when the distance misses epsilon.
    """
    from .fourier_bohr import fb_coefficient  # deferred to avoid a module cycle
    from .signals import eval_trig_poly

    p = _validate_p(p)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    g = mollify(f, eta) if eta is not None else f
    coeffs: list[tuple[Character, complex]] = []
    for chi in freq_grid:
        est = fb_coefficient(g, chi, seq)
        c = est.value
        if eta is not None:
            att = mollifier_attenuation(f.domain, chi, eta)
            if abs(att) > 1e-6:
                c = c / att
        coeffs.append((chi, complex(c)))
    # drop a tail of small coefficients whose total weight cannot move the
    # distance by more than epsilon/4
    order = sorted(range(len(coeffs)), key=lambda i: (abs(coeffs[i][1]), coeffs[i][0].freq))
    budget = epsilon / 4.0
    dropped = set()
    spent = 0.0
    for i in order:
        w = abs(coeffs[i][1])
        if spent + w <= budget:
            dropped.add(i)
            spent += w
        else:
            break
    kept = tuple(coeffs[i] for i in range(len(coeffs)) if i not in dropped)
    poly = TrigPolynomial(kept)
    approx = eval_trig_poly(poly, f.domain)
    dist = _sup_distance(f, approx, k, p)
    return BohrApproximation(poly=poly, distance=dist,
                             achieved=bool(dist < epsilon),
                             eta=None if eta is None else float(eta))
