"""Counting conjugacy classes of free groups acting on trees and the hyperbolic plane."""

from . import group
from .coding import AugmentedShift, LabeledAutomaton, build_coset_acceptor, build_geodesic_acceptor, scc_decompose
from .config import ExperimentConfig, load_config, parse_config
from .counting import (
    CountSeries,
    RateFit,
    count_conjugacy_class,
    count_coset_orbit,
    count_cylinder_restricted,
    count_full_orbit,
    estimate_C,
    fit_rate,
    length_comparison_audit,
    poincare_partial,
)
from .errors import (
    AuditError,
    BudgetError,
    CodingError,
    ConjCountError,
    ConvergenceError,
    UnstableCodingError,
    UsageError,
)
from .geometry import HalfPlane, Mobius, TreePoint, WeightedTree, distance, gromov_product
from .group import GeneratorSet
from .potential import ConstantPotential, RoofPotential
from .spectral import critical_exponent, lattice_test, maximal_path_multiplicity, pressure, system_delta
from .system import GroupSystem

__version__ = "0.1.0"

__all__ = [
    "AuditError",
    "AugmentedShift",
    "BudgetError",
    "CodingError",
    "ConjCountError",
    "ConstantPotential",
    "ConvergenceError",
    "CountSeries",
    "ExperimentConfig",
    "GeneratorSet",
    "GroupSystem",
    "HalfPlane",
    "LabeledAutomaton",
    "Mobius",
    "RateFit",
    "RoofPotential",
    "TreePoint",
    "UnstableCodingError",
    "UsageError",
    "WeightedTree",
    "build_coset_acceptor",
    "build_geodesic_acceptor",
    "count_conjugacy_class",
    "count_coset_orbit",
    "count_cylinder_restricted",
    "count_full_orbit",
    "critical_exponent",
    "distance",
    "estimate_C",
    "fit_rate",
    "gromov_product",
    "group",
    "lattice_test",
    "length_comparison_audit",
    "load_config",
    "maximal_path_multiplicity",
    "parse_config",
    "poincare_partial",
    "pressure",
    "scc_decompose",
    "system_delta",
]
