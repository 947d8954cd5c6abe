"""Projected membership deciders.

Each decider maps the instance through a sampled ``T`` and reports
whether ``T(p)`` is separated from ``T(X)``. Only ``SEPARATED`` is a
probabilistic claim; ``NOT_SEPARATED`` carries no guarantee.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from rpmem import bounds
from rpmem.bounds import ConstantConfig, KSelection
from rpmem.geometry import (
    Cone,
    DoublingSet,
    FiniteSet,
    IntegerFiber,
    Polytope,
    dist_to_cone,
    dist_to_finite,
    doubling_constant,
    enumerate_fiber,
    max_vertex_dist,
    min_norm_point_polytope,
    mu_A_closed_form,
    mu_A_estimate,
)
from rpmem.linalg import (
    DimensionMismatchError,
    Distribution,
    ExactPathError,
    ProjectionMatrix,
    ProjectionSpec,
    Scaling,
    apply,
    apply_exact,
    as_points,
    as_vector,
    sample_projection,
)

DEFAULT_TOL = 1e-7
MU_SAMPLES = 500


class Outcome(str, enum.Enum):
    ORIGINAL_MEMBER = "OriginalMember"
    SEPARATED = "Separated"
    NOT_SEPARATED = "NotSeparated"


@dataclass(frozen=True)
class Decision:
    outcome: Outcome
    # projected distance, or the integer l-infinity gap on the exact path; None when vacuous
    margin: float | int | None
    k_used: int
    threshold: float | int
    selection: KSelection | None = None
    guarantee: float = 0.0
    vacuous: bool = False

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "margin": self.margin,
            "k_used": self.k_used,
            "threshold": self.threshold,
            "guarantee": self.guarantee,
            "vacuous": self.vacuous,
            "selection": None if self.selection is None else self.selection.to_dict(),
        }


def _guarantee(selection):
    return 0.0 if selection is None else selection.guarantee


def _check_m(T, dim):
    if T.spec.m != dim:
        raise DimensionMismatchError(f"projection expects dimension {T.spec.m}, data has {dim}")


def decide_finite(p, X, T: ProjectionMatrix, tau: float = 0.0, selection=None) -> Decision:
    """Separated iff ``min_x ||T(p) - T(x)|| > tau``."""
    p = as_vector(p, "p")
    X = X.points if isinstance(X, (FiniteSet, DoublingSet)) else as_points(X, "X")
    _check_m(T, p.shape[0])
    d, _ = dist_to_finite(p, X)
    if d == 0.0:
        return Decision(Outcome.ORIGINAL_MEMBER, 0.0, T.spec.k, tau, selection, _guarantee(selection))
    img = apply(T, p - X)
    margin = float(np.sqrt(np.min(np.sum(img * img, axis=1))))
    outcome = Outcome.SEPARATED if margin > tau else Outcome.NOT_SEPARATED
    return Decision(outcome, margin, T.spec.k, tau, selection, _guarantee(selection))


def _is_row_of(v, M):
    return bool(np.any(np.all(M == v, axis=1)))


def decide_polytope(b, P, T: ProjectionMatrix, tol: float = DEFAULT_TOL, selection=None,
                    check_original: bool = True) -> Decision:
    """Separated iff ``dist(T(b), conv T(a_i)) > tol``."""
    b = as_vector(b, "b")
    V = P.points if isinstance(P, Polytope) else as_points(P, "vertices")
    _check_m(T, b.shape[0])
    member = _is_row_of(b, V)
    if not member and check_original:
        member = min_norm_point_polytope(b, V, tol=tol * 1e-2).distance <= tol
    if member:
        return Decision(Outcome.ORIGINAL_MEMBER, 0.0, T.spec.k, tol, selection, _guarantee(selection))
    margin = min_norm_point_polytope(apply(T, b), apply(T, V), tol=tol * 1e-2).distance
    outcome = Outcome.SEPARATED if margin > tol else Outcome.NOT_SEPARATED
    return Decision(outcome, margin, T.spec.k, tol, selection, _guarantee(selection))


def decide_cone(b, K, T: ProjectionMatrix, tol: float = DEFAULT_TOL, selection=None,
                check_original: bool = True) -> Decision:
    """Separated iff ``dist(T(b), cone T(a_i)) > tol``; inputs must be unit norm."""
    b = as_vector(b, "b")
    G = K.points if isinstance(K, Cone) else as_points(K, "generators")
    _check_m(T, b.shape[0])
    if abs(float(np.linalg.norm(b)) - 1.0) > 1e-9 or not Cone(G).is_unit():
        raise ValueError("cone decisions need b and all generators of unit norm")
    member = _is_row_of(b, G)
    if not member and check_original:
        member = dist_to_cone(b, G, tol=tol * 1e-2).distance <= tol
    if member:
        return Decision(Outcome.ORIGINAL_MEMBER, 0.0, T.spec.k, tol, selection, _guarantee(selection))
    margin = dist_to_cone(apply(T, b), apply(T, G), tol=tol * 1e-2).distance
    outcome = Outcome.SEPARATED if margin > tol else Outcome.NOT_SEPARATED
    return Decision(outcome, margin, T.spec.k, tol, selection, _guarantee(selection))


def integer_gap(F: IntegerFiber, T: ProjectionMatrix):
    """Exact core of the integer decider; integer arithmetic only.

    Returns ``(member, gap)`` where ``member`` says some fiber point solves
    the removed rows exactly and ``gap`` is the minimum over the fiber of
    ``max_r |T(b~) - sum_j x_j T(a'_j)|_r``, or ``None`` for an empty fiber.
    """
    A_red, b_red = F.reduced()
    if T.spec.m != len(b_red):
        raise DimensionMismatchError(f"projection expects dimension {T.spec.m}, reduced system has {len(b_red)} rows")
    n = F.n
    Tb = apply_exact(T, b_red)
    cols = [apply_exact(T, [row[j] for row in A_red]) for j in range(n)]
    member = False
    gap = None
    for x in enumerate_fiber(F):
        if not member:
            member = all(bv == sum(row[j] * x[j] for j in range(n)) for row, bv in zip(A_red, b_red))
        g = max(abs(tb - sum(x[j] * cols[j][r] for j in range(n))) for r, tb in enumerate(Tb))
        if gap is None or g < gap:
            gap = g
    return member, gap


def decide_integer_exact(F: IntegerFiber, T: ProjectionMatrix, selection=None) -> Decision:
    """Separated iff ``T(b~) != sum_j x_j T(a'_j)`` for every fiber point, in exact arithmetic."""
    if T.spec.distribution is not Distribution.RADEMACHER or T.spec.scaling is not Scaling.NONE:
        raise ExactPathError("integer decisions need an unscaled Rademacher projection")
    if F.m < 2:
        raise ValueError("need at least one row besides the positive row")
    member, gap = integer_gap(F, T)
    g = _guarantee(selection)
    if member:
        return Decision(Outcome.ORIGINAL_MEMBER, 0, T.spec.k, 0, selection, g)
    if gap is None:
        return Decision(Outcome.SEPARATED, None, T.spec.k, 0, selection, g, vacuous=True)
    outcome = Outcome.SEPARATED if gap > 0 else Outcome.NOT_SEPARATED
    return Decision(outcome, gap, T.spec.k, 0, selection, g)


def decide_pipeline(instance, p_or_b=None, delta: float = 0.05, tau: float = 0.0,
                    cfg: ConstantConfig = ConstantConfig(), seed: int = 0) -> Decision:
    """Pick k for the instance class, sample ``T`` and run the matching decider.

    For polytopes and cones ``tau`` is the decision tolerance (default
    1e-7 when ``tau`` is 0). Integer fibers ignore ``p_or_b`` and ``tau``.
    """
    if isinstance(instance, IntegerFiber):
        sel = bounds.k_for_integer_fiber(instance.n, instance.B, delta, cfg)
        T = sample_projection(ProjectionSpec(instance.m - 1, sel.k, Distribution.RADEMACHER, seed=seed))
        return decide_integer_exact(instance, T, sel)

    p = as_vector(p_or_b, "p")
    X = instance.points
    if p.shape[0] != X.shape[1]:
        raise DimensionMismatchError(f"point has dimension {p.shape[0]}, set has {X.shape[1]}")
    m = X.shape[1]

    def gaussian(k):
        return sample_projection(ProjectionSpec(m, k, Distribution.GAUSSIAN, seed=seed))

    if isinstance(instance, (FiniteSet, DoublingSet)):
        d, _ = dist_to_finite(p, X)
        if d == 0.0:
            return Decision(Outcome.ORIGINAL_MEMBER, 0.0, cfg.k_min, tau, None, 0.0)
        if isinstance(instance, FiniteSet):
            sel = bounds.k_for_finite_threshold(len(instance), delta, tau, d, cfg)
        else:
            lam, _ = doubling_constant(X)
            sel = bounds.k_for_doubling(lam, delta, tau, d, cfg)
        return decide_finite(p, X, gaussian(sel.k), tau, sel)

    tol = tau if tau > 0 else DEFAULT_TOL
    if isinstance(instance, Polytope):
        d = min_norm_point_polytope(p, X, tol=tol * 1e-2).distance
        if d <= tol:
            return Decision(Outcome.ORIGINAL_MEMBER, 0.0, cfg.k_min, tol, None, 0.0)
        D = max_vertex_dist(p, X)
        sel = bounds.k_for_polytope(len(instance), d, D, delta, cfg)
        return decide_polytope(p, X, gaussian(sel.k), tol, sel, check_original=False)

    if isinstance(instance, Cone):
        d = dist_to_cone(p, X, tol=tol * 1e-2).distance
        if d <= tol:
            return Decision(Outcome.ORIGINAL_MEMBER, 0.0, cfg.k_min, tol, None, 0.0)
        n = len(instance)
        if n <= 2:
            mu, estimated = mu_A_closed_form(X), False
        else:
            mu, estimated = mu_A_estimate(X, MU_SAMPLES, seed), True
        sel = bounds.k_for_cone(n, min(d, 1.0), mu, delta, cfg, mu_A_is_lower_bound=estimated)
        return decide_cone(p, X, gaussian(sel.k), tol, sel, check_original=False)

    raise TypeError(f"unsupported instance type {type(instance).__name__}")

