"""Euclidean distances from a point to finite sets, polytopes and cones."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from rpmem.linalg import DimensionMismatchError, as_points, as_vector


class ConvergenceError(RuntimeError):
    """Iterative solver hit its cap; ``best`` holds the last iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NearestPoint(NamedTuple):
    distance: float
    weights: np.ndarray


def _check_dims(v, pts):
    if pts.shape[1] != v.shape[0]:
        raise DimensionMismatchError(f"point has dimension {v.shape[0]}, set has {pts.shape[1]}")


def dist_to_finite(p, X) -> tuple[float, int]:
    """Minimum distance from ``p`` to the rows of ``X`` and the first index attaining it."""
    p = as_vector(p, "p")
    X = as_points(X, "X")
    _check_dims(p, X)
    diff = X - p
    sq = np.sum(diff * diff, axis=1)
    i = int(np.argmin(sq))
    return float(np.sqrt(sq[i])), i


def max_vertex_dist(b, vertices) -> float:
    b = as_vector(b, "b")
    V = as_points(vertices, "vertices")
    _check_dims(b, V)
    diff = V - b
    return float(np.sqrt(np.max(np.sum(diff * diff, axis=1))))


def _affine_minimizer(P):
    # min ||P^T a|| subject to sum(a) = 1
    s = P.shape[0]
    M = np.empty((s + 1, s + 1))
    M[:s, :s] = P @ P.T
    M[:s, s] = 1.0
    M[s, :s] = 1.0
    M[s, s] = 0.0
    rhs = np.zeros(s + 1)
    rhs[s] = 1.0
    sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return sol[:s]


def min_norm_point_polytope(b, vertices, tol: float = 1e-9, max_iter: int | None = None) -> NearestPoint:
    """Distance from ``b`` to ``conv(vertices)`` by Wolfe's min-norm-point method.

    Works on the shifted points ``a_i - b``. For an iterate ``x`` in the
    shifted hull, ``||x||`` is an upper bound on the distance and
    ``min_i <x, a_i - b> / ||x||`` a lower bound (separating hyperplane);
    iteration stops once they are within ``tol``.
    """
    b = as_vector(b, "b")
    V = as_points(vertices, "vertices")
    _check_dims(b, V)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = V.shape[0]
    if max_iter is None:
        max_iter = 50 * n + 100
    P = V - b
    norms = np.einsum("ij,ij->i", P, P)
    j0 = int(np.argmin(norms))
    S = [j0]
    w = np.array([1.0])
    x = P[j0].copy()
    zero_w = 1e-14

    def result():
        weights = np.zeros(n)
        weights[S] = w
        return NearestPoint(float(np.linalg.norm(x)), weights)

    for _ in range(max_iter):
        upper = float(np.linalg.norm(x))
        if upper <= tol:
            return result()
        dots = P @ x
        j = int(np.argmin(dots))
        lower = max(0.0, float(dots[j]) / upper)
        if upper - lower <= tol:
            return result()
        if j in S:
            # no descent vertex left: the gap is float noise on the current face
            if upper - lower <= max(tol, 1e-10 * max(1.0, upper)):
                return result()
            raise ConvergenceError(f"stalled with gap {upper - lower:.3e}", best=result())
        S.append(j)
        w = np.append(w, 0.0)
        for _ in range(n + 1):
            alpha = _affine_minimizer(P[S])
            if np.all(alpha > zero_w):
                w = alpha
                break
            neg = alpha <= zero_w
            ratios = w[neg] / (w[neg] - alpha[neg])
            theta = float(np.min(ratios)) if ratios.size else 1.0
            w = w + theta * (alpha - w)
            keep = w > zero_w
            if not np.any(keep):
                keep[int(np.argmax(w))] = True
            S = [s for s, kp in zip(S, keep) if kp]
            w = np.clip(w[keep], 0.0, None)
            w = w / w.sum()
        x = w @ P[S]
    raise ConvergenceError("iteration cap reached", best=result())


def dist_to_cone(b, generators, tol: float = 1e-9, max_iter: int | None = None) -> NearestPoint:
    """Distance from ``b`` to ``cone(generators)`` by Lawson-Hanson active-set NNLS.

    Stops when the multipliers ``A^T (b - A theta)`` are at most ``tol``
    (scaled by ``max(1, ||b||)``) on every inactive generator.
    """
    b = as_vector(b, "b")
    G = as_points(generators, "generators")
    _check_dims(b, G)
    A = G.T
    n = A.shape[1]
    if max_iter is None:
        max_iter = 3 * n + 30
    gtol = tol * max(1.0, float(np.linalg.norm(b)))
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    resid = b.copy()
    grad = A.T @ resid
    it = 0
    while np.any(~passive) and np.max(np.where(passive, -np.inf, grad)) > gtol:
        it += 1
        if it > max_iter:
            raise ConvergenceError("iteration cap reached", best=NearestPoint(float(np.linalg.norm(resid)), x))
        j = int(np.argmax(np.where(passive, -np.inf, grad)))
        passive[j] = True
        while True:
            s = np.zeros(n)
            idx = np.flatnonzero(passive)
            s[idx] = np.linalg.lstsq(A[:, idx], b, rcond=None)[0]
            if np.all(s[idx] > 0):
                break
            bad = idx[s[idx] <= 0]
            alpha = float(np.min(x[bad] / (x[bad] - s[bad])))
            x = x + alpha * (s - x)
            passive &= x > 1e-15
            x[~passive] = 0.0
            if not np.any(passive):
                s = np.zeros(n)
                break
        x = s
        resid = b - A @ x
        grad = A.T @ resid
    return NearestPoint(float(np.linalg.norm(b - A @ x)), x)
