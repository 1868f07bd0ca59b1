"""Numerical toolkit for anisotropic H^1 Fourier multiplier criteria."""

from .geometry import (DilationParams, Ellipsoid, Geometry, GeometryError,
                       Rectangle, build_geometry, geometry_report)
from .measure import (CriterionReport, MeasureError, PointMeasure,
                      annulus_mass, annulus_sup, bin_measure, criterion_sum,
                      criterion_sup, discretize_density)
from .spectral import (Atom, Grid, SampledFunction, SpectralError,
                       bessel_j, bochner_riesz_inverse, chi_kernel,
                       fourier_at, make_atom, pair_against_measure,
                       verify_atom_decay)
from .hardy import (HardyError, LPFamily, build_lp_family, default_j_range,
                    h1_proxy, square_function)
from .suites import SUITES, SuiteReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "DilationParams", "Ellipsoid", "Geometry", "GeometryError", "Rectangle",
    "build_geometry", "geometry_report",
    "CriterionReport", "MeasureError", "PointMeasure", "annulus_mass",
    "annulus_sup", "bin_measure", "criterion_sum", "criterion_sup",
    "discretize_density",
    "Atom", "Grid", "SampledFunction", "SpectralError", "bessel_j",
    "bochner_riesz_inverse", "chi_kernel", "fourier_at", "make_atom",
    "pair_against_measure", "verify_atom_decay",
    "HardyError", "LPFamily", "build_lp_family", "default_j_range",
    "h1_proxy", "square_function",
    "SUITES", "SuiteReport", "run_suite",
    "__version__",
]
