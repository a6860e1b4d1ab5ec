"""Automata coding group elements and cosets, and the shifts built from them."""

from .automaton import LabeledAutomaton, build_geodesic_acceptor
from .coset import (
    build_coset_acceptor,
    default_signature_radius,
    is_minimal_representative,
    minimal_coset_representatives,
    verify_coset_acceptor,
)
from .shift import (
    APERIODIC_EMPTY,
    AugmentedShift,
    Component,
    ComponentGraph,
    component_period,
    scc_decompose,
)

__all__ = [
    "APERIODIC_EMPTY",
    "AugmentedShift",
    "Component",
    "ComponentGraph",
    "LabeledAutomaton",
    "build_coset_acceptor",
    "build_geodesic_acceptor",
    "component_period",
    "default_signature_radius",
    "is_minimal_representative",
    "minimal_coset_representatives",
    "scc_decompose",
    "verify_coset_acceptor",
]
