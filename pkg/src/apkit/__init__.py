"""Numerical almost-periodicity toolkit on sampled abelian groups.

Grids stand in for the group (real grids, integer lattices, cyclic groups,
tori, and their products), windows carry Haar measure, and the classical
(semi)norms, averages, convolutions, and Fourier-Bohr scans become
deterministic finite computations with explicit convergence evidence.
"""

from .domain import (Axis, DomainSpec, SupportExhausted, VanHoveReport,
                     VanHoveSequence, Window, WRAP, ZERO_EXTEND, cyclic,
                     haar_measure, integer_lattice, k_boundary_measure,
                     product, real_grid, torus_grid, van_hove_report, window)
from .signals import (AtomicMeasure, Character, GridFunction, TrigPolynomial,
                      add, atomic_measure, character, conjugate, constant,
                      eval_trig_poly, from_callable, grid_function, involution,
                      magnitude, mul, pointwise, reflect, scale, sub,
                      translate, trig_polynomial, zeros)
from .stepanov import (AlmostPeriodReport, BohrApproximation, EpsNetCertificate,
                       EquivalenceBounds, NormResult, almost_period_scan,
                       bohr_approximate, equivalence_bounds, mollifier_attenuation,
                       mollify, orbit_eps_net, stepanov_norm, truncate,
                       window_lp_mean)
from .weyl import (CONVERGED, MeanEstimate, NOT_CONVERGED, SUPPORT_EXHAUSTED,
                   almost_period_kernel, equi_weyl_scan, van_hove_mean,
                   weyl_seminorm, weyl_smooth)
from .convolution import EberleinResult, convolve, convolve_measure, eberlein
from .fourier_bohr import (AutocorrCheck, ParsevalReport, SpectralLine,
                           SpectrumReport, UniquenessReport,
                           autocorr_identity_check, default_freq_grid,
                           fb_coefficient, parseval_check, spectrum_scan,
                           synthesize, uniqueness_distance)
from .gallery import (CLASS_CHAIN, ClassificationReport, ClassifyConfig,
                      ClassVerdict, classify, gallery_function, gallery_names,
                      half_step, levitan_example, periodized_inverse_sqrt,
                      validate_chain)

__version__ = "0.1.0"

__all__ = [
    "Axis", "DomainSpec", "SupportExhausted", "VanHoveReport", "VanHoveSequence",
    "Window", "WRAP", "ZERO_EXTEND", "cyclic", "haar_measure",
    "k_boundary_measure", "product", "real_grid", "torus_grid",
    "van_hove_report", "window",
    "AtomicMeasure", "Character", "GridFunction", "TrigPolynomial", "add",
    "atomic_measure", "character", "conjugate", "constant", "eval_trig_poly",
    "from_callable", "grid_function", "involution", "magnitude", "mul",
    "pointwise", "reflect", "scale", "sub", "translate", "trig_polynomial",
    "zeros", "integer_lattice",
    "AlmostPeriodReport", "BohrApproximation", "EpsNetCertificate",
    "EquivalenceBounds", "NormResult", "almost_period_scan", "bohr_approximate",
    "equivalence_bounds", "mollifier_attenuation", "mollify", "orbit_eps_net",
    "stepanov_norm", "truncate", "window_lp_mean",
    "CONVERGED", "MeanEstimate", "NOT_CONVERGED", "SUPPORT_EXHAUSTED",
    "almost_period_kernel", "equi_weyl_scan", "van_hove_mean", "weyl_seminorm",
    "weyl_smooth",
    "EberleinResult", "convolve", "convolve_measure", "eberlein",
    "AutocorrCheck", "ParsevalReport", "SpectralLine", "SpectrumReport",
    "UniquenessReport", "autocorr_identity_check", "default_freq_grid",
    "fb_coefficient", "parseval_check", "spectrum_scan", "synthesize",
    "uniqueness_distance",
    "CLASS_CHAIN", "ClassificationReport", "ClassifyConfig", "ClassVerdict",
    "classify", "gallery_function", "gallery_names", "half_step",
    "levitan_example", "periodized_inverse_sqrt", "validate_chain",
    "__version__",
]
