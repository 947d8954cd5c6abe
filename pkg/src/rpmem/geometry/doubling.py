"""Doubling constants of finite point sets and the halving ball cover.

A ball here is ``B_X(p, r)`` with ``p`` in ``X``; covering balls are
closed and centred at points of ``X``. Radii for the exhaustive search
are the distances from ``p`` to the other points, since the ball's
content only changes there and a smaller radius only makes covering
harder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from rpmem.linalg import as_points, as_vector

EXACT_CAP = 24
# closed-ball slack for distances that are equal in exact arithmetic
REL_SLACK = 1e-12


def _pairwise(X):
    diff = X[:, None, :] - X[None, :, :]
    D = np.sqrt(np.sum(diff * diff, axis=2))
    np.fill_diagonal(D, 0.0)
    return D


def _mask(bools) -> int:
    out = 0
    for i in np.flatnonzero(bools):
        out |= 1 << int(i)
    return out


def _greedy_cover(universe: int, sets: list[int]) -> list[int]:
    chosen = []
    left = universe
    while left:
        i = max(range(len(sets)), key=lambda s: (sets[s] & left).bit_count())
        if not sets[i] & left:
            raise ValueError("sets do not cover the universe")
        chosen.append(i)
        left &= ~sets[i]
    return chosen


def min_set_cover(universe: int, sets: list[int]) -> list[int]:
    """Exact minimum set cover over bitmasks by branch and bound.

    Returns indices into ``sets``. Branches on the uncovered element with
    the fewest covering sets; prunes with ``ceil(|left| / max gain)``.
    """
    sets = [s & universe for s in sets]
    best = _greedy_cover(universe, sets)
    elements = [e for e in range(universe.bit_length()) if universe >> e & 1]
    covering = {e: [i for i, s in enumerate(sets) if s >> e & 1] for e in elements}
    seen: dict[int, int] = {}

    def rec(left, chosen):
        nonlocal best
        if not left:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        gain = max((s & left).bit_count() for s in sets)
        if len(chosen) + -(-left.bit_count() // gain) >= len(best):
            return
        if seen.get(left, len(best) + 1) <= len(chosen):
            return
        seen[left] = len(chosen)
        e = min((e for e in elements if left >> e & 1), key=lambda e: len(covering[e]))
        for i in sorted(covering[e], key=lambda i: -(sets[i] & left).bit_count()):
            chosen.append(i)
            rec(left & ~sets[i], chosen)
            chosen.pop()

    rec(universe, [])
    return best


def _subproblems(D):
    n = D.shape[0]
    for p in range(n):
        for r in np.unique(D[p]):
            if r <= 0:
                continue
            ball = _mask(D[p] <= r * (1 + REL_SLACK))
            half = r / 2 * (1 + REL_SLACK)
            sets = [_mask(D[c] <= half) & ball for c in range(n)]
            yield ball, [s for s in sets if s]


def _doubling(X, solver, cap=None):
    X = as_points(X, "X")
    if cap is not None and X.shape[0] > cap:
        raise ValueError(f"{X.shape[0]} points exceed the exact cap {cap}; use the greedy variant")
    D = _pairwise(X)
    lam = 1
    for ball, sets in _subproblems(D):
        if ball.bit_count() <= lam:
            continue
        lam = max(lam, len(solver(ball, sets)))
    return lam


def doubling_constant_exact(X, cap: int = EXACT_CAP) -> int:
    """Exact doubling constant of a small finite set via exact set cover."""
    return _doubling(X, min_set_cover, cap)


def doubling_constant_greedy(X) -> int:
    """Greedy upper bound on the doubling constant; within ``1 + ln|X|`` of exact."""
    return _doubling(X, _greedy_cover)


def doubling_constant(X, mode: str = "auto", cap: int = EXACT_CAP) -> tuple[int, str]:
    """Return ``(lambda, mode_used)``; ``auto`` is exact up to ``cap`` points."""
    n = as_points(X, "X").shape[0]
    if mode == "auto":
        mode = "exact" if n <= cap else "greedy"
    if mode == "exact":
        return doubling_constant_exact(X, cap), mode
    if mode == "greedy":
        return doubling_constant_greedy(X), mode
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class BallCover:
    centers: np.ndarray
    center_indices: tuple[int, ...]
    radius: float
    covered_set_size: int


def halving_levels(r: float, eps: float) -> int:
    """``ceil(log2(r / eps))`` with float noise at exact powers of two absorbed."""
    x = math.log2(r / eps)
    return max(0, math.ceil(x - 1e-12 * max(1.0, abs(x))))


def ball_cover(X, p, r: float, eps: float, cap: int = EXACT_CAP) -> BallCover:
    """Cover ``B_X(p, r)`` with balls of radius ``eps`` centred in ``X``.

    Halves the radius ``ceil(log2(r/eps))`` times; at each level every
    current ball is re-covered by a minimum set of half-radius balls
    (exact set cover up to ``cap`` points, greedy beyond). Redundant
    centres are pruned at the end.
    """
    X = as_points(X, "X")
    p = as_vector(p, "p")
    if not 0 < eps <= r:
        raise ValueError(f"need 0 < eps <= r, got eps={eps}, r={r}")
    hits = np.flatnonzero(np.all(X == p, axis=1))
    if hits.size == 0:
        raise ValueError("p must be a point of X")
    D = _pairwise(X)
    n = X.shape[0]
    root = int(hits[0])
    ball = _mask(D[root] <= r * (1 + REL_SLACK))
    levels = halving_levels(r, eps)
    current = [root]
    rho = r
    for _ in range(levels):
        half = rho / 2
        nxt: list[int] = []
        for c in current:
            sub = ball & _mask(D[c] <= rho * (1 + REL_SLACK))
            sets = [_mask(D[q] <= half * (1 + REL_SLACK)) & sub for q in range(n)]
            cand = [q for q in range(n) if sets[q]]
            solver = min_set_cover if sub.bit_count() <= cap else _greedy_cover
            picked = solver(sub, [sets[q] for q in cand])
            nxt.extend(cand[i] for i in picked)
        current = list(dict.fromkeys(nxt))
        rho = half
    reach = [_mask(D[c] <= eps * (1 + REL_SLACK)) & ball for c in range(n)]
    for c in reversed(list(current)):
        rest = [q for q in current if q != c]
        union = 0
        for q in rest:
            union |= reach[q]
        if rest and union & ball == ball:
            current = rest
    idx = tuple(sorted(current))
    return BallCover(X[list(idx)], idx, float(eps), ball.bit_count())
