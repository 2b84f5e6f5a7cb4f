"""Triangulation of p-adic semi-algebraic sets.

Exact discrete polytopes in Gamma^q = (Z u {+inf})^q, p-adic simplexes and
complexes over Q_p, monomial cells, and the lifting construction that turns
a rooted cellular monoplex into a simplicial complex homeomorphic to it.
"""

from .cells import CellularMonoplex, MonomialCell, MonomialFn, boundary_cell, cell_member, is_fitting, mu_v, nu_v
from .dispatch import DispatchResult, LiftedComplex, build_lift, dispatch, eval_Phi, eval_phi, invert_phi
from .good_direction import certify_direction, find_direction, leading_form, shear
from .padic import PadicNumber, SubgroupSpec, ac, in_subgroup, nth_root, valuation
from .polynomial import Polynomial
from .polytope import (
    INF,
    AffineMap,
    DiscretePolytope,
    contains,
    extend_to_face,
    face,
    from_bounds,
    is_simplex,
    validate,
)
from .simplex import PadicSimplex, SimplicialComplex, build_retraction, make_simplex, validate_complex

__version__ = "0.1.0"

__all__ = [
    "INF",
    "AffineMap",
    "CellularMonoplex",
    "DiscretePolytope",
    "DispatchResult",
    "LiftedComplex",
    "MonomialCell",
    "MonomialFn",
    "PadicNumber",
    "PadicSimplex",
    "Polynomial",
    "SimplicialComplex",
    "SubgroupSpec",
    "ac",
    "boundary_cell",
    "build_lift",
    "build_retraction",
    "cell_member",
    "certify_direction",
    "contains",
    "dispatch",
    "eval_Phi",
    "eval_phi",
    "extend_to_face",
    "face",
    "find_direction",
    "from_bounds",
    "in_subgroup",
    "invert_phi",
    "is_fitting",
    "is_simplex",
    "leading_form",
    "make_simplex",
    "mu_v",
    "nth_root",
    "nu_v",
    "shear",
    "valuation",
    "validate",
    "validate_complex",
]
