"""Fourier-Bohr coefficients, spectrum scans, and their consistency checks.

A coefficient is the group average of a conjugated character against the
function, taken along an explicit window sequence; all scans work over a
finite user-supplied frequency grid. The countable-spectrum picture turns
into a practical rule: compute every grid coefficient, keep lines above a
noise threshold, and track the residual against the mean square.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import DomainSpec, VanHoveSequence, Window
from .signals import (Character, GridFunction, TrigPolynomial, character,
                      involution, sub)
from .stepanov import _validate_p, stepanov_norm
from .weyl import DEFAULT_TOL, MeanEstimate, estimate_indices, van_hove_mean


def fb_coefficient(f: GridFunction, chi: Character, seq: VanHoveSequence,
                   probe_ys=(), n_max: int | None = None,
                   tol: float = DEFAULT_TOL, n_list=None) -> MeanEstimate:
    """Average of conj(chi) * f along the sequence, with convergence evidence.

    The uniform-in-base-point behaviour is probed exactly as in
    van_hove_mean; pass probe_ys to populate y_uniformity_gap.
    """
    weighted = np.conj(chi.values(f.domain)) * f.values
    g = GridFunction(f.domain, weighted, f.margin)
    return van_hove_mean(g, seq, probe_ys=probe_ys, n_max=n_max, tol=tol,
                         n_list=n_list)


def default_freq_grid(domain: DomainSpec, count: int | None = None) -> list[Character]:
    """Canonical finite scan grid for the dual group.

    Cyclic axes enumerate all n characters. Real and torus axes use lattice
    multiples of 1/extent, count of them centered on zero (default
    min(n, 257)); integer axes use multiples of 1/n inside one period of the
    dual circle. Multi-axis grids take the cartesian product.
    """
    per_axis: list[np.ndarray] = []
    for ax in domain.axes:
        if ax.kind == "cyclic":
            per_axis.append(np.arange(ax.n, dtype=float))
        else:
            m = min(ax.n, 257) if count is None else int(count)
            half = (m - 1) // 2
            ks = np.arange(-half, m - half)
            per_axis.append(ks / (ax.n * ax.h))
    grids = np.meshgrid(*per_axis, indexing="ij")
    freqs = zip(*(g.ravel() for g in grids))
    return [character(*fr) for fr in freqs]


@dataclass(frozen=True)
class SpectralLine:
    freq: tuple[float, ...]
    coefficient: complex
    gap: float

    def to_json(self) -> dict:
        return {"freq": list(self.freq), "coefficient": self.coefficient,
                "gap": self.gap}


@dataclass(frozen=True)
class SpectrumReport:
    """Lines above threshold plus whole-grid summary statistics.

    bessel_sum accumulates |c|^2 over the entire scanned grid (not only the
    reported lines), so parseval_residual = mean_square - bessel_sum is the
    honest unexplained remainder. Lines are sorted by |coefficient|
    descending, frequency ascending on ties.
    """

    lines: tuple[SpectralLine, ...]
    mean_square: float
    bessel_sum: float
    parseval_residual: float
    freq_grid: tuple[tuple[float, ...], ...]
    threshold: float

    def to_json(self) -> dict:
        return {"lines": [l.to_json() for l in self.lines],
                "mean_square": self.mean_square,
                "bessel_sum": self.bessel_sum,
                "parseval_residual": self.parseval_residual,
                "freq_grid": [list(fr) for fr in self.freq_grid],
                "threshold": self.threshold}


def _scan_coefficients(f: GridFunction, seq: VanHoveSequence, freq_grid,
                       n_max: int | None, tol: float):
    from . import _engine
    n_stop = seq.n_max if n_max is None else min(int(n_max), seq.n_max)
    ns = estimate_indices(n_stop)

    def one(chi: Character) -> MeanEstimate:
        return fb_coefficient(f, chi, seq, n_max=n_stop, tol=tol, n_list=ns)

    return _engine.map_ordered(one, list(freq_grid)), n_stop, ns


def spectrum_scan(f: GridFunction, seq: VanHoveSequence, freq_grid=None,
                  threshold: float | None = None, n_max: int | None = None,
                  tol: float = DEFAULT_TOL) -> SpectrumReport:
    """Coefficients over the whole grid; lines filtered by |c| >= threshold.

    The default threshold is 1e-3 times the root mean square of f along the
    same sequence, separating genuine lines from averaging noise.
    """
    freq_grid = default_freq_grid(f.domain) if freq_grid is None else list(freq_grid)
    ests, n_stop, ns = _scan_coefficients(f, seq, freq_grid, n_max, tol)
    sq = GridFunction(f.domain, np.abs(f.values) ** 2, f.margin)
    mean_sq = float(np.real(van_hove_mean(sq, seq, n_max=n_stop, tol=tol,
                                          n_list=ns).value))
    if threshold is None:
        threshold = 1e-3 * mean_sq ** 0.5
    bessel = float(sum(abs(e.value) ** 2 for e in ests))
    lines = [SpectralLine(chi.freq, complex(e.value), e.cauchy_gap)
             for chi, e in zip(freq_grid, ests) if abs(e.value) >= threshold]
    lines.sort(key=lambda l: (-abs(l.coefficient), l.freq))
    return SpectrumReport(lines=tuple(lines), mean_square=mean_sq,
                          bessel_sum=bessel,
                          parseval_residual=mean_sq - bessel,
                          freq_grid=tuple(chi.freq for chi in freq_grid),
                          threshold=float(threshold))


@dataclass(frozen=True)
class ParsevalReport:
    mean_square: float
    bessel_sum: float
    residual: float
    n_used: int

    def to_json(self) -> dict:
        return {"mean_square": self.mean_square, "bessel_sum": self.bessel_sum,
                "residual": self.residual, "n_used": self.n_used}


def parseval_check(f: GridFunction, seq: VanHoveSequence, freq_grid=None,
                   n_max: int | None = None, tol: float = DEFAULT_TOL) -> ParsevalReport:
    """Residual mean_square - sum |c|^2 over the grid, symmetric windows only.

    The equality needs negation-invariant averaging windows, so sequences
    without the symmetric property are rejected.
    """
    if not seq.symmetric:
        raise ValueError("Parseval verification needs a symmetric window sequence")
    freq_grid = default_freq_grid(f.domain) if freq_grid is None else list(freq_grid)
    ests, n_stop, ns = _scan_coefficients(f, seq, freq_grid, n_max, tol)
    sq = GridFunction(f.domain, np.abs(f.values) ** 2, f.margin)
    mean_sq = float(np.real(van_hove_mean(sq, seq, n_max=n_stop, tol=tol,
                                          n_list=ns).value))
    bessel = float(sum(abs(e.value) ** 2 for e in ests))
    return ParsevalReport(mean_square=mean_sq, bessel_sum=bessel,
                          residual=mean_sq - bessel, n_used=n_stop)


@dataclass(frozen=True)
class AutocorrCheck:
    lhs: complex
    rhs: float
    discrepancy: float

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "discrepancy": self.discrepancy}


def autocorr_identity_check(f: GridFunction, chi: Character, seq: VanHoveSequence,
                            n_max: int | None = None,
                            tol: float = DEFAULT_TOL) -> AutocorrCheck:
    """Coefficient of the averaged autocorrelation vs squared coefficient.

    lhs averages conj(chi) against the Eberlein product of f with its
    involution; rhs is |c_chi(f)|^2. Wrapping domains only: the averaged
    autocorrelation must live on the same grid as f.
    """
    from .convolution import eberlein
    if not f.domain.all_wrap:
        raise ValueError("autocorrelation check needs a wrapping domain")
    auto = eberlein(f, involution(f), seq, n_max=n_max, tol=tol)
    lhs = complex(fb_coefficient(auto.function, chi, seq, n_max=n_max, tol=tol).value)
    rhs = abs(complex(fb_coefficient(f, chi, seq, n_max=n_max, tol=tol).value)) ** 2
    return AutocorrCheck(lhs=lhs, rhs=rhs, discrepancy=abs(lhs - rhs))


def synthesize(report: SpectrumReport) -> TrigPolynomial:
    """Finite synthesis of the reported lines: sum of c * character."""
    return TrigPolynomial(tuple((character(*l.freq), l.coefficient)
                                for l in report.lines))


@dataclass(frozen=True)
class UniquenessReport:
    """Numeric face of coefficient uniqueness: two distances, one heuristic.

    flag goes up when the windowed norm distance dwarfs the largest
    coefficient discrepancy on the grid, meaning the two functions differ in
    a way the scanned frequencies cannot see (off-grid spectrum, or data not
    covered by the uniqueness statement).
    """

    coefficient_discrepancy: float
    sp_distance: float
    flag: bool

    def to_json(self) -> dict:
        return {"coefficient_discrepancy": self.coefficient_discrepancy,
                "sp_distance": self.sp_distance, "flag": self.flag}


def uniqueness_distance(f: GridFunction, g: GridFunction, seq: VanHoveSequence,
                        freq_grid, k: Window, p: float,
                        n_max: int | None = None) -> UniquenessReport:
    p = _validate_p(p)
    diff = sub(f, g)
    worst = 0.0
    for chi in freq_grid:
        est = fb_coefficient(diff, chi, seq, n_max=n_max)
        worst = max(worst, abs(est.value))
    dist = stepanov_norm(diff, k, p).value
    flag = dist > max(100.0 * worst, 1e-8)
    return UniquenessReport(coefficient_discrepancy=worst, sp_distance=dist,
                            flag=bool(flag))
