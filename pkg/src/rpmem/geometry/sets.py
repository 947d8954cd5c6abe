"""Set classes a membership query can be posed against."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from rpmem.geometry.fiber import IntegerFiber
from rpmem.linalg import as_points


@dataclass(frozen=True, eq=False)
class _PointBacked:
    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", as_points(self.points))

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


class FiniteSet(_PointBacked):
    """Finite point list X."""


class Polytope(_PointBacked):
    """``conv`` of the vertex rows."""


class Cone(_PointBacked):
    """``cone`` of the generator rows."""

    def is_unit(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(np.linalg.norm(self.points, axis=1) - 1.0) <= tol))


class DoublingSet(_PointBacked):
    """Finite sample of a set, handled through its doubling constant."""


SetInstance = Union[FiniteSet, Polytope, Cone, IntegerFiber, DoublingSet]
