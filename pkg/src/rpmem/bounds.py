"""Chi-squared tail bounds and projection-dimension selectors.

Every selector returns a :class:`KSelection` that records the rule, its
inputs and a snapshot of the constants used. Logarithms are natural
except for the doubling dimension, which is ``log2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np

EPS_GRID_SIZE = 10_000


class BoundDomainError(ValueError):
    """Raised when a bound is asked for outside the range where it holds."""


@dataclass(frozen=True)
class ConstantConfig:
    C_jl: float = 1.0 / 32.0
    C_doubling: float = 8.0
    kappa: float = 0.5
    k_min: int = 3

    def __post_init__(self):
        if not self.C_jl > 0:
            raise ValueError("C_jl must be positive")
        if not self.C_doubling > 0:
            raise ValueError("C_doubling must be positive")
        if not 0 < self.kappa < 1:
            raise ValueError("kappa must lie in (0, 1)")
        if int(self.k_min) != self.k_min or self.k_min < 3:
            raise ValueError("k_min must be an integer >= 3")
        object.__setattr__(self, "k_min", int(self.k_min))

    @classmethod
    def from_dict(cls, data: dict) -> "ConstantConfig":
        unknown = set(data) - {"C_jl", "C_doubling", "kappa", "k_min"}
        if unknown:
            raise ValueError(f"unknown constant(s): {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


class Rule(str, enum.Enum):
    FINITE_THRESHOLD = "FiniteThreshold"
    INTEGER_FIBER = "IntegerFiber"
    POLYTOPE = "Polytope"
    CONE = "Cone"
    DOUBLING_EXACT = "DoublingExact"
    DOUBLING_THRESHOLD = "DoublingThreshold"


@dataclass(frozen=True)
class KSelection:
    k: int
    rule: Rule
    inputs: dict
    constants: ConstantConfig
    # lower bound on Prob(Separated) at k for a truly separated instance
    guarantee: float = 0.0
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "rule": self.rule.value,
            "inputs": dict(self.inputs),
            "constants": self.constants.to_dict(),
            "guarantee": self.guarantee,
            "notes": list(self.notes),
        }


def _ceil(x: float) -> int:
    # absorb float noise in ratios such as ln(1e5)/ln(10) that are integral in exact arithmetic
    return math.ceil(x - 1e-12 * max(1.0, abs(x)))


def _check_delta(delta):
    if not 0 < delta < 1:
        raise BoundDomainError(f"delta must lie in (0, 1), got {delta}")


def chi2_cdf_upper(k: int, x: float) -> float:
    """Chernoff upper bound ``(z e^{1-z})^{k/2}`` on the chi-squared CDF, z = x/k."""
    if k < 1:
        raise BoundDomainError("k must be >= 1")
    if not 0 < x < k:
        raise BoundDomainError(f"bound needs 0 < x < k, got x={x}, k={k}")
    z = x / k
    return math.exp(0.5 * k * (math.log(z) + 1.0 - z))


def small_norm_prob_bound(k: int, delta: float) -> float:
    """Upper bound on ``Prob(||T a|| <= delta)`` for unit ``a`` and Gaussian ``T``.

    Uses ``(e delta^2 / k)^{k/2}`` and, for ``k >= 3``, also ``delta^k``.
    """
    if k < 1:
        raise BoundDomainError("k must be >= 1")
    _check_delta(delta)
    bound = math.exp(0.5 * k * (1.0 + 2.0 * math.log(delta) - math.log(k)))
    if k >= 3:
        bound = min(bound, delta**k)
    return bound


def finite_failure_bound(set_size: int, k: int, d: float, tau: float) -> float:
    """Union bound ``|X| * Prob(||Tz|| <= tau/d)`` on a missed separation."""
    if tau <= 0:
        return 0.0
    return min(1.0, set_size * small_norm_prob_bound(k, tau / d))


def k_for_finite_threshold(set_size, delta, tau, d, cfg=ConstantConfig()) -> KSelection:
    _check_delta(delta)
    if set_size < 1:
        raise ValueError("set_size must be positive")
    if not tau > 0:
        raise BoundDomainError("tau must be positive")
    if tau >= d:
        raise BoundDomainError(f"threshold too large: tau={tau} >= d={d}")
    raw = _ceil(math.log(set_size / delta) / math.log(d / tau))
    k = max(cfg.k_min, raw)
    inputs = {"set_size": set_size, "delta": delta, "tau": tau, "d": d}
    return KSelection(k, Rule.FINITE_THRESHOLD, inputs, cfg, guarantee=1.0 - delta)


def k_for_integer_fiber(n, B, delta, cfg=ConstantConfig()) -> KSelection:
    _check_delta(delta)
    if n < 1 or B < 1:
        raise ValueError("n and B must be positive integers")
    raw = _ceil((math.log(2.0 / delta) + B * math.log(n + B - 1)) / cfg.C_jl)
    k = max(cfg.k_min, raw)
    inputs = {"n": n, "B": B, "delta": delta}
    return KSelection(k, Rule.INTEGER_FIBER, inputs, cfg, guarantee=1.0 - delta)


def fiber_size_bound(n: int, B: int) -> int:
    """``(n + B - 1)^B``, the crude count of the fiber used by the selector."""
    return (n + B - 1) ** B


def _jl_success(prefactor, eps, k, cfg):
    gap = eps * eps - eps**3
    return min(1.0, max(0.0, 1.0 - prefactor * math.exp(-cfg.C_jl * gap * k)))


def polytope_eps_grid(cap: float, size: int = EPS_GRID_SIZE) -> np.ndarray:
    """Geometric grid on the open interval (0, cap), plus 2/3 when it lies inside."""
    grid = cap * np.geomspace(1e-8, 1.0 - 1e-12, size)
    if 2.0 / 3.0 < cap:
        grid = np.append(grid, 2.0 / 3.0)
    return grid


def polytope_success_bound(n, k, d, D, cfg=ConstantConfig()) -> tuple[float, float]:
    """Best ``1 - 2n^2 exp(-C(eps^2 - eps^3)k)`` over eps in ``(0, d^2/D^2)``.

    Returns ``(bound, eps)``.
    """
    if not 0 < d <= D:
        raise BoundDomainError(f"need 0 < d <= D, got d={d}, D={D}")
    cap = min(1.0, (d / D) ** 2)
    grid = polytope_eps_grid(cap)
    gaps = grid**2 - grid**3
    i = int(np.argmax(gaps))
    eps = float(grid[i])
    return _jl_success(2.0 * n * n, eps, k, cfg), eps


def cone_eps(d: float, mu_A: float) -> float:
    if not 0 < d <= 1:
        raise BoundDomainError(f"cone bound assumes unit-norm data, needs 0 < d <= 1, got {d}")
    if mu_A < 0:
        raise BoundDomainError("mu_A must be nonnegative")
    return d * d / (mu_A * mu_A + 2.0 * math.sqrt(1.0 - d * d) * mu_A + 1.0)


def cone_success_bound(n, k, d, mu_A, cfg=ConstantConfig()) -> tuple[float, float]:
    """``1 - 2n(n+1) exp(-C(eps^2 - eps^3)k)`` with the cone's eps. Returns ``(bound, eps)``."""
    eps = cone_eps(d, mu_A)
    return _jl_success(2.0 * n * (n + 1), eps, k, cfg), eps


def _k_for_target(prefactor, eps, delta, cfg):
    gap = eps * eps - eps**3
    if gap <= 0:
        raise BoundDomainError(f"eps={eps} makes the bound vacuous")
    return max(cfg.k_min, _ceil(math.log(prefactor / delta) / (cfg.C_jl * gap)))


def k_for_polytope(n, d, D, delta, cfg=ConstantConfig()) -> KSelection:
    """Smallest k whose polytope success bound reaches ``1 - delta``."""
    _check_delta(delta)
    _, eps = polytope_success_bound(n, 1, d, D, cfg)
    k = _k_for_target(2.0 * n * n, eps, delta, cfg)
    bound, _ = polytope_success_bound(n, k, d, D, cfg)
    inputs = {"n": n, "d": d, "D": D, "delta": delta, "eps": eps}
    return KSelection(k, Rule.POLYTOPE, inputs, cfg, guarantee=bound)


def k_for_cone(n, d, mu_A, delta, cfg=ConstantConfig(), mu_A_is_lower_bound=False) -> KSelection:
    """Smallest k whose cone success bound reaches ``1 - delta``.

    When ``mu_A`` is only a lower bound the eps used is too large, so the
    selection is tagged optimistic.
    """
    _check_delta(delta)
    eps = cone_eps(d, mu_A)
    k = _k_for_target(2.0 * n * (n + 1), eps, delta, cfg)
    bound, _ = cone_success_bound(n, k, d, mu_A, cfg)
    inputs = {"n": n, "d": d, "mu_A": mu_A, "delta": delta, "eps": eps}
    notes = ("optimistic: mu_A is a sampled lower bound",) if mu_A_is_lower_bound else ()
    return KSelection(k, Rule.CONE, inputs, cfg, guarantee=bound, notes=notes)


def k_for_doubling(lambda_X, delta, tau, d, cfg=ConstantConfig()) -> KSelection:
    _check_delta(delta)
    if lambda_X < 1:
        raise ValueError("lambda_X must be >= 1")
    if not tau > 0:
        raise BoundDomainError("tau must be positive")
    if tau >= cfg.kappa * d:
        raise BoundDomainError(f"tau={tau} violates tau < kappa*d = {cfg.kappa * d}")
    ratio = _ceil(cfg.C_doubling * math.log(lambda_X / delta) / math.log(d / tau))
    dim = _ceil(cfg.C_doubling * math.log2(lambda_X))
    k = max(cfg.k_min, ratio, dim)
    inputs = {"lambda_X": lambda_X, "delta": delta, "tau": tau, "d": d}
    return KSelection(k, Rule.DOUBLING_THRESHOLD, inputs, cfg, guarantee=1.0 - delta)


def k_for_doubling_exact(lambda_X, cfg=ConstantConfig()) -> KSelection:
    """``k >= C log2(lambda_X)`` for plain (unthresholded) separation."""
    if lambda_X < 1:
        raise ValueError("lambda_X must be >= 1")
    k = max(cfg.k_min, _ceil(cfg.C_doubling * math.log2(lambda_X)))
    return KSelection(k, Rule.DOUBLING_EXACT, {"lambda_X": lambda_X}, cfg, guarantee=0.0)
