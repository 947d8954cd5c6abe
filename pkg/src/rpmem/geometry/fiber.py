"""Integer fibers ``{x in Z^n_+ : a^i . x = b_i}`` cut out by a positive row."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from rpmem.linalg import as_int_vector


@dataclass(frozen=True)
class IntegerFiber:
    """Integer program data ``A x = b`` with row ``positive_row`` strictly positive.

    ``box`` is an optional pair ``(L, U)`` of per-coordinate integer bounds.
    ``B`` bounds the entries of ``b``; it defaults to ``max |b_j|``.
    """

    A: tuple[tuple[int, ...], ...]
    b: tuple[int, ...]
    positive_row: int = 0
    box: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    B: int | None = None

    def __post_init__(self):
        A = tuple(as_int_vector(row, "A row") for row in self.A)
        b = as_int_vector(self.b, "b")
        if not A or not A[0]:
            raise ValueError("A must be a non-empty matrix")
        n = len(A[0])
        if any(len(row) != n for row in A):
            raise ValueError("A rows must have equal length")
        if len(b) != len(A):
            raise ValueError(f"b has length {len(b)}, A has {len(A)} rows")
        i = self.positive_row
        if not 0 <= i < len(A):
            raise ValueError(f"positive_row {i} out of range")
        if any(a < 1 for a in A[i]):
            raise ValueError(f"row {i} must have all entries >= 1")
        if b[i] < 0:
            raise ValueError(f"b[{i}] must be nonnegative")
        box = self.box
        if box is not None:
            L, U = (as_int_vector(v, "box") for v in box)
            if len(L) != n or len(U) != n:
                raise ValueError("box bounds must have length n")
            box = (L, U)
        B = max(abs(v) for v in b) if self.B is None else int(self.B)
        if any(abs(v) > B for v in b):
            raise ValueError(f"entries of b exceed the declared bound B={B}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return len(self.A[0])

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def row(self) -> tuple[int, ...]:
        return self.A[self.positive_row]

    def reduced(self) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
        """``(A~, b~)``: the system with the positive row removed."""
        i = self.positive_row
        A_red = tuple(row for r, row in enumerate(self.A) if r != i)
        b_red = tuple(v for r, v in enumerate(self.b) if r != i)
        return A_red, b_red


def enumerate_fiber(F: IntegerFiber) -> list[tuple[int, ...]]:
    """All of ``Z`` (intersected with the box), in ascending lexicographic order."""
    a = F.row
    target = F.b[F.positive_row]
    n = len(a)
    if F.box is None:
        lo = (0,) * n
        hi = None
    else:
        lo = tuple(max(0, v) for v in F.box[0])
        hi = F.box[1]
        if any(l > h for l, h in zip(lo, hi)):
            return []
    # suffix minima/maxima of a . x over the remaining coordinates
    min_rest = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        min_rest[j] = min_rest[j + 1] + a[j] * lo[j]
    max_rest = None
    if hi is not None:
        max_rest = [0] * (n + 1)
        for j in range(n - 1, -1, -1):
            max_rest[j] = max_rest[j + 1] + a[j] * hi[j]

    out = []
    x = [0] * n

    def rec(j, rem):
        if j == n - 1:
            q, r = divmod(rem, a[j])
            if r == 0 and q >= lo[j] and (hi is None or q <= hi[j]):
                x[j] = q
                out.append(tuple(x))
            return
        top = (rem - min_rest[j + 1]) // a[j]
        if hi is not None:
            top = min(top, hi[j])
        for v in range(lo[j], top + 1):
            nxt = rem - a[j] * v
            if max_rest is not None and nxt > max_rest[j + 1]:
                continue
            x[j] = v
            rec(j + 1, nxt)

    if target >= min_rest[0] and (max_rest is None or target <= max_rest[0]):
        rec(0, target)
    return out


def fiber_count(n: int, total: int) -> int:
    """Number of ``x in Z^n_+`` with ``sum(x) = total``."""
    return comb(n + total - 1, total)
