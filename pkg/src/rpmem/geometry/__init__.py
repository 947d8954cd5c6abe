"""Geometric oracles consumed by the bounds and the deciders."""

from rpmem.geometry.distance import (
    ConvergenceError,
    NearestPoint,
    dist_to_cone,
    dist_to_finite,
    max_vertex_dist,
    min_norm_point_polytope,
)
from rpmem.geometry.doubling import (
    BallCover,
    ball_cover,
    doubling_constant,
    doubling_constant_exact,
    doubling_constant_greedy,
    min_set_cover,
)
from rpmem.geometry.fiber import IntegerFiber, enumerate_fiber, fiber_count
from rpmem.geometry.lp import (
    MembershipError,
    induced_norm,
    mu_A_closed_form,
    mu_A_estimate,
    simplex_min,
)
from rpmem.geometry.sets import Cone, DoublingSet, FiniteSet, Polytope, SetInstance

__all__ = [
    "Cone",
    "DoublingSet",
    "FiniteSet",
    "Polytope",
    "SetInstance",
    "BallCover",
    "ConvergenceError",
    "IntegerFiber",
    "MembershipError",
    "NearestPoint",
    "ball_cover",
    "dist_to_cone",
    "dist_to_finite",
    "doubling_constant",
    "doubling_constant_exact",
    "doubling_constant_greedy",
    "enumerate_fiber",
    "fiber_count",
    "induced_norm",
    "max_vertex_dist",
    "min_norm_point_polytope",
    "min_set_cover",
    "mu_A_closed_form",
    "mu_A_estimate",
    "simplex_min",
]
