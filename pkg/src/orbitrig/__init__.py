"""Exact rigidity analysis of symmetric and periodic bar-joint frameworks."""
from .analysis import (
    adjusted_counts,
    higher_dim_flex,
    lift_residuals,
    maxwell_combined,
    maxwell_finite,
    maxwell_finite_symmetric,
    maxwell_periodic,
    motion_space,
    rank_float,
)
from .exact import kernel_exact, rank_exact
from .framework import (
    Edge,
    FrameworkError,
    OrbitFramework,
    OrbitGraph,
    expand_patch,
    load,
    parse,
    random_generic_placement,
    serialize,
    validate,
)
from .matrices import (
    build_matrix,
    combined_orbit_matrix,
    finite_orbit_matrix,
    finite_rigidity_matrix,
    periodic_orbit_matrix,
)
from .symmetry import Gain, LatticeFamily, PointGroup, SymmetryError, enumerate_group, make_family
from .tracer import export, trace

__version__ = "0.1.0"
