"""Vectors, seeded randomness and random projection operators.

Randomness comes from numpy's Philox4x64 counter-based generator keyed
directly by the 64-bit seed, so a seed names the same stream on every
platform. Gaussian entries use numpy's ziggurat ``standard_normal``;
Rademacher entries map the low bit of ``integers(0, 2)`` to -1/+1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

SEED_MASK = (1 << 64) - 1


class Distribution(str, enum.Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"


class Scaling(str, enum.Enum):
    NONE = "none"
    INV_SQRT_K = "inv_sqrt_k"


class InvalidSpecError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


class ExactPathError(TypeError):
    """Raised when the integer path is asked to run on a non-integer matrix."""


def as_vector(v, name="vector") -> np.ndarray:
    """Validate and return a read-only float64 copy of ``v``."""
    arr = np.array(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def as_points(points, name="points") -> np.ndarray:
    """Validate an ``(n, m)`` array of points with uniform dimension."""
    try:
        arr = np.array(points, dtype=np.float64)
    except ValueError as exc:
        raise ValueError(f"{name} must have uniform dimension") from exc
    if arr.ndim == 1 and arr.size:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} must be a non-empty list of vectors")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def as_int_vector(v, name="vector") -> tuple[int, ...]:
    out = []
    for x in v:
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
            raise TypeError(f"{name} must contain integers, got {type(x).__name__}")
        out.append(int(x))
    return tuple(out)


def make_rng(seed: int) -> np.random.Generator:
    """Philox generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & SEED_MASK))


def derive_seed(master_seed: int, index: int) -> int:
    """Hash ``(master_seed, index)`` to an independent 64-bit stream seed."""
    ss = np.random.SeedSequence([int(master_seed) & SEED_MASK, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ProjectionSpec:
    m: int
    k: int
    distribution: Distribution = Distribution.GAUSSIAN
    scaling: Scaling = Scaling.NONE
    seed: int = 0

    def __post_init__(self):
        for name in ("m", "k"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, (int, np.integer)) or val < 1:
                raise InvalidSpecError(f"{name} must be a positive integer, got {val!r}")
        object.__setattr__(self, "distribution", Distribution(self.distribution))
        object.__setattr__(self, "scaling", Scaling(self.scaling))
        if not 0 <= int(self.seed) <= SEED_MASK:
            raise InvalidSpecError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    spec: ProjectionSpec
    entries: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def factor(self) -> float:
        return 1.0 / math.sqrt(self.spec.k) if self.spec.scaling is Scaling.INV_SQRT_K else 1.0

    @cached_property
    def _float_entries(self) -> np.ndarray:
        out = self.entries.astype(np.float64)
        out.setflags(write=False)
        return out

    @cached_property
    def int_rows(self) -> tuple[tuple[int, ...], ...]:
        """Entries as nested tuples of Python ints (Rademacher only)."""
        if self.spec.distribution is not Distribution.RADEMACHER:
            raise ExactPathError("exact arithmetic requires a Rademacher matrix")
        return tuple(tuple(int(t) for t in row) for row in self.entries)


def sample_projection(spec: ProjectionSpec) -> ProjectionMatrix:
    rng = make_rng(spec.seed)
    if spec.distribution is Distribution.GAUSSIAN:
        entries = rng.standard_normal((spec.k, spec.m))
    else:
        entries = (2 * rng.integers(0, 2, size=(spec.k, spec.m), dtype=np.int8) - 1).astype(np.int8)
    entries.setflags(write=False)
    return ProjectionMatrix(spec, entries)


def apply(T: ProjectionMatrix, v) -> np.ndarray:
    """Image of ``v`` under ``T``.

    ``v`` may be a single vector of length m or an ``(n, m)`` stack of row
    vectors, in which case the result is ``(n, k)``.
    """
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape[-1:] != (T.spec.m,) or arr.ndim not in (1, 2):
        raise DimensionMismatchError(f"expected trailing dimension {T.spec.m}, got shape {arr.shape}")
    out = arr @ T._float_entries.T
    if T.spec.scaling is Scaling.INV_SQRT_K:
        out = out * T.factor
    return out


def apply_exact(T: ProjectionMatrix, v) -> tuple[int, ...]:
    """Integer image of an integer vector; no rounding anywhere."""
    if T.spec.distribution is not Distribution.RADEMACHER or T.spec.scaling is not Scaling.NONE:
        raise ExactPathError("exact path needs an unscaled Rademacher matrix")
    vec = as_int_vector(v)
    if len(vec) != T.spec.m:
        raise DimensionMismatchError(f"expected length {T.spec.m}, got {len(vec)}")
    return tuple(sum(t * x for t, x in zip(row, vec)) for row in T.int_rows)
