"""Dense two-phase simplex, the generator-induced norm and mu_A."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from rpmem.linalg import DimensionMismatchError, as_points, as_vector, make_rng


class MembershipError(ValueError):
    """Point lies outside the cone spanned by the generators."""


class LPInfeasible(ValueError):
    pass


def _pivot(tab, r, c):
    piv = tab[r][c]
    tab[r] = [v / piv for v in tab[r]]
    for i, row in enumerate(tab):
        if i != r and row[c] != 0:
            f = row[c]
            tab[i] = [a - f * bv for a, bv in zip(row, tab[r])]


def _run(tab, basis, obj, allowed, tol):
    # Bland's rule on tableau rows; obj is the reduced-cost row (last entry = -value)
    m = len(tab)
    while True:
        enter = next((j for j in allowed if obj[j] < -tol), None)
        if enter is None:
            return
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > tol:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] - tol or (abs(ratio - best[0]) <= tol and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise ValueError("LP is unbounded")
        r = best[1]
        f = obj[enter]
        _pivot(tab, r, enter)
        obj[:] = [o - f * t for o, t in zip(obj, tab[r])]
        basis[r] = enter


def simplex_min(A, rhs, cost, tol=1e-10):
    """Minimise ``cost . theta`` subject to ``A theta = rhs``, ``theta >= 0``.

    Entries may be floats or :class:`fractions.Fraction`; with fractions
    pass ``tol=0`` for exact pivoting. Returns ``(value, theta)``.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    zero = rhs[0] * 0 if m else 0
    rows = []
    for i in range(m):
        sign = -1 if rhs[i] < 0 else 1
        rows.append([sign * a for a in A[i]] + [zero] * m + [sign * rhs[i]])
        rows[i][n + i] = zero + 1
    basis = [n + i for i in range(m)]
    # phase 1: minimise the sum of artificials
    obj = [zero] * (n + m + 1)
    for row in rows:
        obj = [o - v for o, v in zip(obj, row)]
    for i in range(m):
        obj[n + i] = zero
    _run(rows, basis, obj, range(n + m), tol)
    if -obj[-1] > tol * max(1, m):
        raise LPInfeasible("no nonnegative solution")
    # drive artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(rows):
        if basis[i] >= n:
            col = next((j for j in range(n) if abs(rows[i][j]) > tol), None)
            if col is None:
                del rows[i]
                del basis[i]
                continue
            _pivot(rows, i, col)
            basis[i] = col
        i += 1
    rows = [row[:n] + row[-1:] for row in rows]
    obj = list(cost) + [zero]
    for i, bj in enumerate(basis):
        if obj[bj] != 0:
            f = obj[bj]
            obj = [o - f * t for o, t in zip(obj, rows[i])]
    _run(rows, basis, obj, range(n), tol)
    theta = [zero] * n
    for i, bj in enumerate(basis):
        theta[bj] = rows[i][-1]
    return -obj[-1], theta


def induced_norm(x, generators, tol: float = 1e-9, exact: bool = False):
    """``min sum(theta)`` over ``theta >= 0`` with ``sum theta_i a_i = x``.

    With ``exact=True`` the inputs are converted to exact fractions and the
    result is a :class:`Fraction`.
    """
    if exact:
        xs = [Fraction(v) for v in x]
        G = [[Fraction(v) for v in g] for g in generators]
        if any(len(g) != len(xs) for g in G):
            raise DimensionMismatchError("generator and point dimensions differ")
        A = [[G[j][i] for j in range(len(G))] for i in range(len(xs))]
        try:
            value, _ = simplex_min(A, xs, [Fraction(1)] * len(G), tol=0)
        except LPInfeasible as exc:
            raise MembershipError("point is outside the cone") from exc
        return value
    xv = as_vector(x, "x")
    G = as_points(generators, "generators")
    if G.shape[1] != xv.shape[0]:
        raise DimensionMismatchError("generator and point dimensions differ")
    scale = max(1.0, float(np.max(np.abs(G))), float(np.max(np.abs(xv))))
    A = (G.T / scale).tolist()
    rhs = (xv / scale).tolist()
    try:
        value, _ = simplex_min(A, rhs, [1.0] * G.shape[0], tol=tol * 1e-2)
    except LPInfeasible as exc:
        raise MembershipError("point is outside the cone") from exc
    return float(value)


def _check_unit(G, tol=1e-9):
    norms = np.linalg.norm(G, axis=1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise ValueError("generators must have unit norm")


def mu_A_closed_form(generators) -> float:
    """Exact ``mu_A`` for one or two unit generators.

    For two generators at angle ``phi < pi`` the maximum sits on the
    bisector and equals ``1 / cos(phi / 2)``.
    """
    G = as_points(generators, "generators")
    _check_unit(G)
    if G.shape[0] == 1:
        return 1.0
    if G.shape[0] != 2:
        raise ValueError("closed form only for n <= 2 generators")
    c = float(np.clip(G[0] @ G[1], -1.0, 1.0))
    if c <= -1.0 + 1e-15:
        return 1.0
    return 1.0 / math.sqrt((1.0 + c) / 2.0)


def mu_A_estimate(generators, samples: int, seed: int = 0) -> float:
    """Sampled lower bound on ``mu_A``: running max of ``||x||_A`` over random unit cone points."""
    G = as_points(generators, "generators")
    _check_unit(G)
    n = G.shape[0]
    rng = make_rng(seed)
    best = max(induced_norm(g, G) for g in G)
    for _ in range(samples):
        size = int(rng.integers(1, n + 1))
        support = rng.choice(n, size=size, replace=False)
        theta = np.zeros(n)
        theta[support] = rng.exponential(size=size)
        x = theta @ G
        nx = float(np.linalg.norm(x))
        if nx < 1e-12:
            continue
        try:
            val = induced_norm(x / nx, G)
        except MembershipError:
            continue
        best = max(best, val)
    return best
