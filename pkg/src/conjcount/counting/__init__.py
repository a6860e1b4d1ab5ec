"""Orbit counting, rate fitting and the conjugate length comparison."""

from .comparison import comparison_error, estimate_C, fit_ratio, length_comparison_audit, tau
from .enumerate import Enumeration, enumerate_paths, estimate_envelope
from .orbits import (
    conjugacy_oracle_counts,
    count_conjugacy_class,
    count_coset_orbit,
    count_cylinder_restricted,
    count_full_orbit,
    tree_spectrum,
)
from .series import CountSeries, PoincareValue, RateFit, fit_rate, poincare_partial

__all__ = [
    "CountSeries",
    "Enumeration",
    "PoincareValue",
    "RateFit",
    "comparison_error",
    "conjugacy_oracle_counts",
    "count_conjugacy_class",
    "count_coset_orbit",
    "count_cylinder_restricted",
    "count_full_orbit",
    "enumerate_paths",
    "estimate_C",
    "estimate_envelope",
    "fit_rate",
    "fit_ratio",
    "length_comparison_audit",
    "poincare_partial",
    "tau",
    "tree_spectrum",
]
