"""Named example functions and the almost-periodicity class chain report.

The classifier orders four translate-distance notions from strongest to
weakest (sup, windowed-sup, averaged tail, plain mean) and scans a range of
candidate translates against one epsilon. Membership evidence is a
relatively-dense set of almost periods under each notion; the verdicts then
must come out monotone along the inclusion chain or the report is rejected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _engine
from .domain import (DomainSpec, VanHoveSequence, Window, real_grid,
                     torus_grid, window)
from .signals import GridFunction, from_callable, sub, translate
from .stepanov import _gap_statistics, _validate_p, _weighted, scan_candidates

SQRT2 = math.sqrt(2.0)


# -- example functions -------------------------------------------------------------

def periodized_inverse_sqrt(domain: DomainSpec) -> GridFunction:
    """Period-1 sum of |x|^(-1/2) bumps, sampled at cell centers.

    Each sample reduces x to its representative in [-1/2, 1/2) and takes
    |t|^(-1/2); a cell center landing exactly on an integer is rejected. The
    samples are unbounded as the grid refines, while windowed means stay
    finite; the square is where the means blow up too.
    """
    if domain.ndim != 1 or domain.axes[0].kind not in ("real", "torus"):
        raise ValueError("needs a one-axis real or torus grid")

    def sample(x):
        t = x - np.floor(x + 0.5)
        if np.any(t == 0.0):
            raise ValueError("a cell center hits the singularity; change h")
        return np.abs(t) ** -0.5

    return from_callable(domain, sample, provenance="periodized-inverse-sqrt")


def levitan_example(domain: DomainSpec, alpha: float = 1.0,
                    beta: float = SQRT2) -> GridFunction:
    """sin(1/(2 + cos(alpha x) + cos(beta x))) for rationally independent rates.

    Bounded by 1 and continuous, yet the reciprocal blows up near the
    simultaneous minima of the two cosines, which destroys uniform translate
    control while windowed means survive.
    """
    if domain.ndim != 1:
        raise ValueError("needs a one-axis domain")
    return from_callable(
        domain, lambda x: np.sin(1.0 / (2.0 + np.cos(alpha * x) + np.cos(beta * x))),
        provenance="levitan")


def half_step(domain: DomainSpec) -> GridFunction:
    """0 below 0, the identity ramp on [0, 1], 1 above 1."""
    if domain.ndim != 1:
        raise ValueError("needs a one-axis domain")
    return from_callable(domain, lambda x: np.clip(np.real(x), 0.0, 1.0),
                         provenance="half-step")


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    build: object
    default_domain: object
    doc: str


def _inv_sqrt_domain(h: float | None, span: float | None) -> DomainSpec:
    h = 1e-4 if h is None else float(h)
    n = max(2, int(round(1.0 / h)))
    return torus_grid(n, 1.0 / n, origin=0.0)


def _levitan_domain(h: float | None, span: float | None) -> DomainSpec:
    h = 0.01 if h is None else float(h)
    half = 100.0 if span is None else float(span)
    n = max(2, int(round(2.0 * half / h)))
    return real_grid(n, h, origin=-half)


def _half_step_domain(h: float | None, span: float | None) -> DomainSpec:
    h = 0.05 if h is None else float(h)
    half = 50.0 if span is None else float(span)
    n = max(2, int(round(2.0 * half / h)))
    return real_grid(n, h, origin=-half)


GALLERY: dict[str, GalleryEntry] = {
    "periodized-inverse-sqrt": GalleryEntry(
        "periodized-inverse-sqrt", periodized_inverse_sqrt, _inv_sqrt_domain,
        "period-1 inverse square root spikes; integrable, square is not"),
    "levitan": GalleryEntry(
        "levitan", levitan_example, _levitan_domain,
        "bounded continuous, windowed-mean almost periodic, no sup control"),
    "half-step": GalleryEntry(
        "half-step", half_step, _half_step_domain,
        "ramp from 0 to 1; averages depend on the window sequence"),
}


def gallery_names() -> list[str]:
    return sorted(GALLERY)


def gallery_function(name: str, domain: DomainSpec | None = None,
                     h: float | None = None, span: float | None = None) -> GridFunction:
    if name not in GALLERY:
        raise ValueError(f"unknown gallery name: {name!r} (have {', '.join(gallery_names())})")
    entry = GALLERY[name]
    if domain is None:
        domain = entry.default_domain(h, span)
    return entry.build(domain)


# -- classification ------------------------------------------------------------------

CLASS_CHAIN = ("sap", "stepanov", "weyl", "mean")

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

_VERDICT_ORDER = {FAIL: 0, INCONCLUSIVE: 1, PASS: 2}


@dataclass(frozen=True)
class ClassifyConfig:
    """Scan parameters shared by all four class tests.

    The window should tile the averaging boxes (side dividing every box
    side) so the windowed-sup distance dominates the averaged one by
    construction; distances are clamped monotone regardless, guarding the
    chain against roundoff. gap_bound defaults to an eighth of the scan
    span; a scan span shorter than gap_bound cannot witness relative
    density, making every verdict inconclusive.
    """

    epsilon: float = 0.25
    p: float = 1.0
    window: Window = field(default_factory=lambda: window((0.0,), (1.0,)))
    seq_rule: str = "centered"
    base_side: float = 1.0
    n_max: int = 16
    scan_range: tuple[float, float] = (0.0, 32.0)
    stride: float | None = None
    gap_bound: float | None = None
    # neighbor-jump bound as a fraction of sup|f|, so rescaling f changes
    # nothing; grid refinement drives the jumps of a continuous f to zero
    # while a genuine discontinuity or blow-up keeps them order sup|f|
    uc_threshold: float = 0.25

    def resolved_gap_bound(self) -> float:
        if self.gap_bound is not None:
            return float(self.gap_bound)
        lo, hi = self.scan_range
        return (hi - lo) / 8.0


@dataclass(frozen=True)
class ClassVerdict:
    name: str
    verdict: str
    epsilon: float
    period_count: int
    max_gap: float
    gap_bound: float
    evidence: dict

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict,
                "epsilon": self.epsilon, "period_count": self.period_count,
                "max_gap": self.max_gap, "gap_bound": self.gap_bound,
                "evidence": dict(self.evidence)}


@dataclass(frozen=True)
class ClassificationReport:
    """Distances and verdicts for the chain sap > stepanov > weyl > mean."""

    classes: tuple[ClassVerdict, ...]
    per_t: tuple[tuple[float, float, float, float, float], ...]
    uc_gap: float
    config: ClassifyConfig

    def verdict(self, name: str) -> str:
        for c in self.classes:
            if c.name == name:
                return c.verdict
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"classes": [c.to_json() for c in self.classes],
                "per_t": [list(row) for row in self.per_t],
                "per_t_columns": ["t", "d_sup", "d_stepanov", "d_weyl", "d_mean"],
                "uc_gap": self.uc_gap,
                "config": {
                    "epsilon": self.config.epsilon, "p": self.config.p,
                    "window": self.config.window.to_json(),
                    "seq_rule": self.config.seq_rule,
                    "base_side": self.config.base_side,
                    "n_max": self.config.n_max,
                    "scan_range": list(self.config.scan_range),
                    "stride": self.config.stride,
                    "gap_bound": self.resolved_gap_bound_echo(),
                    "uc_threshold": self.config.uc_threshold,
                }}

    def resolved_gap_bound_echo(self) -> float:
        return self.config.resolved_gap_bound()


def _uniform_continuity_gap(f: GridFunction) -> float:
    """Largest jump between neighboring cells in the trusted region."""
    tv = f.trusted_values()
    if tv.size < 2:
        return 0.0
    gap = float(np.max(np.abs(np.diff(tv))))
    if f.domain.axis_wraps(0) and tv.size == f.domain.axes[0].n:
        gap = max(gap, float(abs(tv[0] - tv[-1])))
    return gap


def _distance_row(f: GridFunction, t: float, cfg: ClassifyConfig,
                  seq: VanHoveSequence):
    """(d_sup, d_stepanov, d_weyl, d_mean) for one candidate translate.

    d_weyl takes the worst averaged distance over the upper half of the
    window indices (the finite stand-in for eventual control); d_mean is the
    plain absolute mean over the largest fitting window. Values are clamped
    so the row is nonincreasing. None when no averaging window fits.
    """
    diff = sub(f, translate(f, t))
    tv = diff.trusted_values()
    if tv.size == 0:
        return None
    d_sup = float(np.max(np.abs(tv)))
    p = cfg.p
    weighted = _weighted(diff.values, p)
    try:
        starts, counts, _ = _engine.resolve_window(diff.domain, cfg.window)
        sums, _ = _engine.sliding_scan_sums(weighted, diff.domain, diff.margin,
                                            starts, counts)
        ncells = 1
        for c in counts:
            ncells *= c
        d_step = float(np.max(np.real(sums)) / ncells) ** (1.0 / p)
    except ValueError:
        return None
    profile = []
    abs_means = []
    summer_abs = _engine.BoxSummer(np.abs(diff.values), diff.domain)
    for n in range(1, cfg.n_max + 1):
        w = seq.window(n)
        try:
            starts, counts, _ = _engine.resolve_window(diff.domain, w)
            sums, _ = _engine.sliding_scan_sums(weighted, diff.domain,
                                                diff.margin, starts, counts)
            _engine.check_window_fits(diff.domain, diff.margin, starts, counts)
        except ValueError:
            break
        ncells = 1
        for c in counts:
            ncells *= c
        profile.append(float(np.max(np.real(sums)) / ncells) ** (1.0 / p))
        abs_means.append(float(np.real(summer_abs.box(starts, counts))) / ncells)
    if not profile:
        return None
    n_cap = max(1, (len(profile) + 1) // 2)
    d_weyl = max(profile[n_cap - 1:])
    d_mean = abs_means[-1]
    # clamp the row monotone against quadrature tie-breaking
    d_step = min(d_step, d_sup)
    d_weyl = min(d_weyl, d_step)
    d_mean = min(d_mean, d_weyl)
    return d_sup, d_step, d_weyl, d_mean


def classify(f: GridFunction, config: ClassifyConfig | None = None) -> ClassificationReport:
    """Scan-range membership verdicts for the four almost-periodicity classes.

    Each class collects the candidates whose distance stays below epsilon and
    passes when the largest gap between them (and to the scan ends) is within
    gap_bound. The sup class additionally requires the uniform-continuity
    proxy: neighbor jumps above uc_threshold fail it outright, whatever the
    scan found. The report is validated against the inclusion chain before
    being returned.
    """
    cfg = config or ClassifyConfig()
    _validate_p(cfg.p)
    if cfg.epsilon <= 0:
        raise ValueError("epsilon must be positive")
    seq = VanHoveSequence(f.domain, cfg.seq_rule, cfg.base_side,
                          max(cfg.n_max, 1))
    ts, step = scan_candidates(f.domain, cfg.scan_range, cfg.stride)
    rows = _engine.map_ordered(
        lambda t: _distance_row(f, float(t), cfg, seq), list(ts))
    per_t = tuple((float(t),) + row for t, row in zip(ts, rows) if row is not None)
    if not per_t:
        raise ValueError("no candidate translate admitted an averaging window")
    scanned = [row[0] for row in per_t]
    lo, hi = scanned[0], scanned[-1]
    span = hi - lo
    gap_bound = cfg.resolved_gap_bound()
    uc_gap = _uniform_continuity_gap(f)
    sup_f = float(np.max(np.abs(f.trusted_values()))) if f.trusted_values().size else 0.0
    uc_limit = cfg.uc_threshold * sup_f

    verdicts = []
    for idx, name in enumerate(CLASS_CHAIN):
        dists = [row[1 + idx] for row in per_t]
        periods = [t for t, d in zip(scanned, dists) if d < cfg.epsilon]
        max_gap = _gap_statistics(periods, lo, hi)
        if span < gap_bound:
            verdict = INCONCLUSIVE
        else:
            verdict = PASS if max_gap <= gap_bound else FAIL
        evidence: dict = {"min_distance": min(dists), "stride": step}
        if name == "sap":
            evidence["uc_gap"] = uc_gap
            evidence["uc_limit"] = uc_limit
            if uc_gap > uc_limit:
                verdict = FAIL
        verdicts.append(ClassVerdict(
            name=name, verdict=verdict, epsilon=cfg.epsilon,
            period_count=len(periods), max_gap=max_gap, gap_bound=gap_bound,
            evidence=evidence))
    report = ClassificationReport(classes=tuple(verdicts), per_t=per_t,
                                  uc_gap=uc_gap, config=cfg)
    validate_chain(report)
    return report


def validate_chain(report: ClassificationReport) -> None:
    """Reject reports whose verdicts break the inclusion ordering."""
    ranks = [_VERDICT_ORDER[c.verdict] for c in report.classes]
    for a, b, ca, cb in zip(ranks, ranks[1:], report.classes, report.classes[1:]):
        if a > b:
            raise ValueError(
                f"inclusion chain violated: {ca.name}={ca.verdict} "
                f"but {cb.name}={cb.verdict}")
