"""Monte Carlo harness: empirical failure rates against the theoretical bounds.

Every trial draws its projection from ``derive_seed(master_seed, t)``, so a
report is a pure function of its :class:`ExperimentConfig` and does not
depend on trial order.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field
from statistics import NormalDist

import numpy as np

from rpmem import bounds
from rpmem.bounds import ConstantConfig
from rpmem.geometry import (
    Cone,
    FiniteSet,
    IntegerFiber,
    Polytope,
    dist_to_cone,
    dist_to_finite,
    enumerate_fiber,
    max_vertex_dist,
    min_norm_point_polytope,
    mu_A_closed_form,
)
from rpmem.linalg import Distribution, ProjectionSpec, derive_seed, make_rng, sample_projection
from rpmem.membership import (
    Outcome,
    decide_cone,
    decide_finite,
    decide_integer_exact,
    decide_polytope,
)

CLASSES = ("finite", "polytope", "cone", "integer", "synthetic")
IFP_TOLERANCES = (1e-6, 1e-9, 1e-12)
MITM_CAP = 4_000_000
# stream index reserved for the exact companion run of the IFP experiment
EXACT_STREAM = 1 << 32


class GeneratorContractError(RuntimeError):
    """An instance generator produced something that is not separated."""


def wilson_interval(successes: int, trials: int, confidence: float = 0.99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class ExperimentConfig:
    cls: str = "finite"
    params: dict = field(default_factory=dict)
    trials: int = 1000
    k: int | None = None
    delta: float = 0.05
    tau: float | None = None
    master_seed: int = 0
    instance_seed: int = 0
    constants: ConstantConfig = field(default_factory=ConstantConfig)

    def __post_init__(self):
        if self.cls not in CLASSES:
            raise ValueError(f"unknown class {self.cls!r}; expected one of {CLASSES}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "constants" in data:
            data["constants"] = ConstantConfig.from_dict(data["constants"])
        return cls(**data)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["constants"] = self.constants.to_dict()
        return out


@dataclass(frozen=True)
class EmpiricalReport:
    failures: int
    trials: int
    rate: float
    wilson_99_lower: float
    wilson_99_upper: float
    theoretical_delta: float
    metadata: dict = field(default_factory=dict)

    @property
    def half_width(self) -> float:
        return (self.wilson_99_upper - self.wilson_99_lower) / 2

    @property
    def within_bound(self) -> bool:
        return self.rate <= self.theoretical_delta + self.half_width

    def to_dict(self) -> dict:
        return {
            "failures": self.failures,
            "trials": self.trials,
            "rate": self.rate,
            "wilson_99_lower": self.wilson_99_lower,
            "wilson_99_upper": self.wilson_99_upper,
            "half_width": self.half_width,
            "theoretical_delta": self.theoretical_delta,
            "within_bound": self.within_bound,
            "metadata": self.metadata,
        }


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(np.ascontiguousarray(part).tobytes() if isinstance(part, np.ndarray) else repr(part).encode())
    return h.hexdigest()[:16]


# --- instance generators -------------------------------------------------------

def finite_instance(m: int, size: int, seed: int):
    """Gaussian point cloud and query; returns ``(p, X, d)`` with ``d`` certified."""
    rng = make_rng(seed)
    X = rng.standard_normal((size, m))
    p = rng.standard_normal(m)
    d, _ = dist_to_finite(p, X)
    if d <= 0:
        raise GeneratorContractError("query coincides with a point of X")
    return p, X, d


def polytope_instance(m: int, n: int, d: float, seed: int, spread: float = 0.5):
    """Query ``b = 0`` at known distance ``d`` from a random polytope.

    Vertices are ``d e_1 + y_i`` with the ``y_i`` orthogonal to ``e_1`` and
    positively combining to 0, so the nearest point is exactly ``d e_1``.
    The largest ``||y_i||`` is ``spread * d``, hence ``D = d sqrt(1 + spread^2)``.
    Returns ``(b, V, d, D)``.
    """
    if m < 2 or n < 1:
        raise ValueError("need m >= 2 and n >= 1")
    rng = make_rng(seed)
    Y = np.zeros((n, m))
    if n > 1:
        Y[: n - 1, 1:] = rng.standard_normal((n - 1, m - 1))
        w = rng.uniform(0.5, 1.5, size=n)
        Y[n - 1] = -(w[: n - 1] @ Y[: n - 1]) / w[n - 1]
        Y *= spread * d / np.max(np.linalg.norm(Y, axis=1))
    V = Y.copy()
    V[:, 0] = d
    b = np.zeros(m)
    certified = min_norm_point_polytope(b, V, tol=1e-12).distance
    if abs(certified - d) > 1e-8 * max(1.0, d):
        raise GeneratorContractError(f"certified distance {certified} differs from {d}")
    D = max_vertex_dist(b, V)
    if n > 1 and abs(D - d * math.sqrt(1 + spread * spread)) > 1e-9 * D:
        raise GeneratorContractError("vertex spread does not match its construction")
    return b, V, d, D


def cone_instance(m: int, n: int, angle: float, seed: int):
    """Unit query at angle ``angle`` off an orthonormal cone; ``d = sin(angle)``.

    The in-cone direction is the normalised sum of the generators and the
    generators are orthonormal, so ``mu_A = sqrt(n)``. Returns ``(b, G, d, mu_A)``.
    """
    if m < n + 1:
        raise ValueError("need m > n for an off-cone direction")
    if not 0 < angle <= math.pi / 2:
        raise ValueError("angle must be in (0, pi/2]")
    rng = make_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((m, n + 1)))
    G = Q[:, :n].T.copy()
    u = G.sum(axis=0) / math.sqrt(n)
    b = math.cos(angle) * u + math.sin(angle) * Q[:, n]
    d = math.sin(angle)
    certified = dist_to_cone(b, G, tol=1e-12).distance
    if abs(certified - d) > 1e-8:
        raise GeneratorContractError(f"certified distance {certified} differs from {d}")
    return b, G, d, math.sqrt(n)


def parity_instance(n: int, B: int, seed: int, extra_rows: int = 2, box=None) -> IntegerFiber:
    """Integer system that is infeasible by parity.

    Row 0 is a positive row with ``b_0 = B``; every other row has even
    coefficients, and at least one of their right-hand sides is odd, so
    ``A x = b`` has no integer solution.
    """
    if n < 1 or B < 1 or extra_rows < 1:
        raise ValueError("need n, B, extra_rows >= 1")
    rng = make_rng(seed)
    top = [int(v) for v in rng.integers(1, 3, size=n)]
    top[int(rng.integers(0, n))] = 1  # keeps b_0 = B reachable
    rows = [top]
    rhs = [B]
    for _ in range(extra_rows):
        rows.append([2 * int(v) for v in rng.integers(-2, 3, size=n)])
        rhs.append(int(rng.integers(-B, B + 1)))
    if all(v % 2 == 0 for v in rhs[1:]):
        rhs[1] = B if B % 2 else B - 1
    return IntegerFiber(tuple(map(tuple, rows)), tuple(rhs), 0, box, B)


def is_feasible(F: IntegerFiber) -> bool:
    A_red, b_red = F.reduced()
    return any(
        all(bv == sum(a * v for a, v in zip(row, x)) for row, bv in zip(A_red, b_red))
        for x in enumerate_fiber(F)
    )


# --- failure estimation --------------------------------------------------------

def _trial_seeds(master_seed, trials):
    return [derive_seed(master_seed, t) for t in range(trials)]


def _build(cfg: ExperimentConfig):
    """Instance data, selected k, theoretical failure bound and a per-trial decider."""
    P = cfg.params
    c = cfg.constants
    if cfg.cls == "finite":
        p, X, d = finite_instance(P.get("m", 50), P.get("size", 1000), cfg.instance_seed)
        tau = d / 10 if cfg.tau is None else cfg.tau
        sel = bounds.k_for_finite_threshold(len(X), cfg.delta, tau, d, c)
        k = cfg.k or sel.k
        theory = cfg.delta if cfg.k is None else bounds.finite_failure_bound(len(X), k, d, tau)

        def run(seed):
            T = sample_projection(ProjectionSpec(X.shape[1], k, Distribution.GAUSSIAN, seed=seed))
            return decide_finite(p, X, T, tau, sel)

        return run, k, theory, {"d": d, "tau": tau, "hash": _digest(p, X)}

    if cfg.cls == "polytope":
        b, V, d, D = polytope_instance(P.get("m", 20), P.get("n", 2), P.get("d", 1.0), cfg.instance_seed,
                                       P.get("spread", 0.5))
        sel = bounds.k_for_polytope(len(V), d, D, cfg.delta, c)
        k = cfg.k or sel.k
        success, _ = bounds.polytope_success_bound(len(V), k, d, D, c)
        tol = cfg.tau or 1e-7

        def run(seed):
            T = sample_projection(ProjectionSpec(V.shape[1], k, Distribution.GAUSSIAN, seed=seed))
            return decide_polytope(b, Polytope(V), T, tol, sel, check_original=False)

        return run, k, 1.0 - success, {"d": d, "D": D, "hash": _digest(b, V)}

    if cfg.cls == "cone":
        n = P.get("n", 2)
        b, G, d, mu = cone_instance(P.get("m", 20), n, P.get("angle", math.pi / 2), cfg.instance_seed)
        if n <= 2:
            mu = mu_A_closed_form(G)
        sel = bounds.k_for_cone(n, d, mu, cfg.delta, c)
        k = cfg.k or sel.k
        success, _ = bounds.cone_success_bound(n, k, d, mu, c)
        tol = cfg.tau or 1e-7

        def run(seed):
            T = sample_projection(ProjectionSpec(G.shape[1], k, Distribution.GAUSSIAN, seed=seed))
            return decide_cone(b, Cone(G), T, tol, sel, check_original=False)

        return run, k, 1.0 - success, {"d": d, "mu_A": mu, "hash": _digest(b, G)}

    if cfg.cls == "integer":
        box = P.get("box")
        F = parity_instance(P.get("n", 3), P.get("B", 2), cfg.instance_seed, P.get("extra_rows", 2), box)
        if is_feasible(F):
            raise GeneratorContractError("integer instance is feasible")
        sel = bounds.k_for_integer_fiber(F.n, F.B, cfg.delta, c)
        k = cfg.k or sel.k

        def run(seed):
            T = sample_projection(ProjectionSpec(F.m - 1, k, Distribution.RADEMACHER, seed=seed))
            return decide_integer_exact(F, T, sel)

        theory = cfg.delta if cfg.k is None else 1.0
        return run, k, theory, {"A": [list(r) for r in F.A], "b": list(F.b), "hash": _digest(F.A, F.b)}

    # synthetic: fails exactly when all k Rademacher signs are +1, i.e. with probability 2^-k
    k = cfg.k or c.k_min

    def run(seed):
        T = sample_projection(ProjectionSpec(1, k, Distribution.RADEMACHER, seed=seed))
        return Outcome.NOT_SEPARATED if bool(np.all(T.entries == 1)) else Outcome.SEPARATED

    return run, k, 2.0**-k, {"hash": "synthetic"}


def estimate_failure(cfg: ExperimentConfig) -> EmpiricalReport:
    """Fraction of trials where the decider misses a true separation."""
    run, k, theory, meta = _build(cfg)
    failures = 0
    for seed in _trial_seeds(cfg.master_seed, cfg.trials):
        outcome = run(seed)
        outcome = getattr(outcome, "outcome", outcome)
        if outcome is Outcome.ORIGINAL_MEMBER:
            raise GeneratorContractError("generator produced a member instance")
        failures += outcome is Outcome.NOT_SEPARATED
    lo, hi = wilson_interval(failures, cfg.trials)
    meta = {"class": cfg.cls, "k": k, "constants": cfg.constants.to_dict(), "params": dict(cfg.params),
            "master_seed": cfg.master_seed, "instance_seed": cfg.instance_seed, **meta}
    return EmpiricalReport(failures, cfg.trials, failures / cfg.trials, lo, hi, float(theory), meta)


# --- floating-point IFP pathology ---------------------------------------------

def _box_sums(coeffs, L, U):
    sums = np.zeros(1)
    for c, lo, hi in zip(coeffs, L, U):
        sums = np.add.outer(sums, c * np.arange(lo, hi + 1, dtype=np.float64)).ravel()
    return sums


def min_lattice_gap(coeffs, target: float, L, U) -> float:
    """``min |c . x - target|`` over integer ``x`` in the box ``[L, U]``, in floating point.

    Meet in the middle: sums over each half of the coordinates, one half
    sorted, nearest partner by binary search.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    n = coeffs.size
    if len(L) != n or len(U) != n:
        raise ValueError("box bounds must match the number of coefficients")
    if any(lo > hi for lo, hi in zip(L, U)):
        raise ValueError("empty box")
    h = n // 2
    left = _box_sums(coeffs[:h], L[:h], U[:h])
    right = np.sort(_box_sums(coeffs[h:], L[h:], U[h:]))
    if left.size > MITM_CAP or right.size > MITM_CAP:
        raise ValueError("box too large for meet-in-the-middle enumeration")
    want = target - left
    pos = np.searchsorted(right, want)
    best = math.inf
    for shift in (-1, 0):
        idx = np.clip(pos + shift, 0, right.size - 1)
        best = min(best, float(np.min(np.abs(left + right[idx] - target))))
    return best


@dataclass(frozen=True)
class IFPReport:
    trials: int
    gaps: list
    gap_quantiles: dict
    scales: list
    below_tolerance: dict
    below_scaled_tolerance: dict
    exact_k: int
    exact_separated: int
    exact_trials: int
    exact_rate: float
    exact_wilson_99_lower: float
    metadata: dict

    def to_dict(self) -> dict:
        return asdict(self)


def reproduce_ifp_float(cfg: ExperimentConfig) -> IFPReport:
    """One-row Gaussian projection of an infeasible box-bounded integer system.

    Records the floating-point gap ``min_x |T(A) x - T(b)|`` per trial and
    how often it falls under common feasibility tolerances, next to the
    exact Rademacher decider run on the same system.
    """
    P = cfg.params
    n = P.get("n", 4)
    L = list(P.get("L", [0] * n))
    U = list(P.get("U", [5] * n))
    if len(L) != n or len(U) != n:
        raise ValueError("box bounds must have length n")
    if any(lo > hi for lo, hi in zip(L, U)):
        raise ValueError("empty box")
    F = parity_instance(n, P.get("B", 2), cfg.instance_seed, P.get("extra_rows", 2), (tuple(L), tuple(U)))
    if is_feasible(F):
        raise GeneratorContractError("IFP instance is feasible")
    A = np.array(F.A, dtype=np.float64)
    b = np.array(F.b, dtype=np.float64)
    reach = np.maximum(np.abs(L), np.abs(U))
    gaps, scales = [], []
    for seed in _trial_seeds(cfg.master_seed, cfg.trials):
        t = make_rng(seed).standard_normal(F.m)
        coeffs = t @ A
        target = float(t @ b)
        gaps.append(min_lattice_gap(coeffs, target, L, U))
        scales.append(abs(target) + float(np.abs(coeffs) @ reach))
    g = np.array(gaps)
    s = np.array(scales)
    quant = {str(q): float(np.quantile(g, q)) for q in (0.0, 0.1, 0.5, 0.9, 1.0)}
    below = {repr(tol): float(np.mean(g < tol)) for tol in IFP_TOLERANCES}
    below_scaled = {repr(tol): float(np.mean(g < tol * s)) for tol in IFP_TOLERANCES}

    sel = bounds.k_for_integer_fiber(F.n, F.B, cfg.delta, cfg.constants)
    k = cfg.k or sel.k
    exact_master = derive_seed(cfg.master_seed, EXACT_STREAM)
    separated = 0
    for seed in _trial_seeds(exact_master, cfg.trials):
        T = sample_projection(ProjectionSpec(F.m - 1, k, Distribution.RADEMACHER, seed=seed))
        separated += decide_integer_exact(F, T, sel).outcome is Outcome.SEPARATED
    lo, _ = wilson_interval(separated, cfg.trials)
    meta = {"n": n, "L": L, "U": U, "A": [list(r) for r in F.A], "b": list(F.b),
            "master_seed": cfg.master_seed, "instance_seed": cfg.instance_seed}
    return IFPReport(cfg.trials, gaps, quant, scales, below, below_scaled, k, separated, cfg.trials,
                     separated / cfg.trials, lo, meta)


# --- constant calibration -----------------------------------------------------

@dataclass(frozen=True)
class CalibrationResult:
    C_hat: float
    intercept: float | None
    status: str  # "fit" or "lower_bound"
    k_grid: list
    rates: list
    points_used: int
    message: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def calibrate_C(cls: str, k_grid, trials: int, params: dict | None = None, delta: float = 0.05,
                tau: float | None = None, master_seed: int = 0, instance_seed: int = 0,
                prefactor: float = 1.0) -> CalibrationResult:
    """Fit ``log(rate) = a - C k`` over the grid points with nonzero failures.

    With fewer than two such points, returns the lower bound on ``C``
    implied by the Wilson upper limits under ``rate <= prefactor * e^{-C k}``.
    """
    ks = sorted(set(int(k) for k in k_grid))
    if len(ks) < 3:
        raise ValueError("k_grid needs at least 3 distinct values")
    rates, uppers = [], []
    for k in ks:
        rep = estimate_failure(ExperimentConfig(cls, dict(params or {}), trials, k, delta, tau,
                                                derive_seed(master_seed, k), instance_seed))
        rates.append(rep.rate)
        uppers.append(rep.wilson_99_upper)
    pos = [(k, r) for k, r in zip(ks, rates) if r > 0]
    if len(pos) >= 2:
        kk = np.array([k for k, _ in pos], dtype=float)
        lr = np.log([r for _, r in pos])
        slope, intercept = np.polyfit(kk, lr, 1)
        return CalibrationResult(float(-slope), float(intercept), "fit", ks, rates, len(pos))
    lb = max((math.log(prefactor) - math.log(u)) / k for k, u in zip(ks, uppers))
    return CalibrationResult(float(lb), None, "lower_bound", ks, rates, len(pos),
                             "too few nonzero failure counts to fit; C_hat is a lower bound")

