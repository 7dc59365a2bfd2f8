"""Dense exact linear algebra over a prime field F_p.

Matrices are stored as read-only ``int64`` numpy arrays with entries in
``[0, p)``.  Elimination always takes the first nonzero entry of a column
as pivot, so every derived basis is reproducible.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np


class FieldError(ValueError):
    """Bad modulus, or operands living over different fields."""


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@lru_cache(maxsize=None)
def inverse_table(p: int) -> np.ndarray:
    """``table[a]`` is the inverse of ``a`` mod p (``table[0] = 0``)."""
    table = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        table[a] = pow(a, -1, p)
    table.flags.writeable = False
    return table


def _check_p(p: int) -> int:
    p = int(p)
    if not is_prime(p):
        raise FieldError(f"modulus {p} is not prime")
    return p


class FpMatrix:
    """Immutable matrix over F_p.

    >>> m = FpMatrix([[1, 2], [2, 4]], 5)
    >>> m.rank
    1
    """

    __slots__ = ("p", "a")

    def __init__(self, entries, p: int, *, check: bool = True):
        if check:
            p = _check_p(p)
        arr = np.array(entries, dtype=np.int64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
        arr %= p
        arr.flags.writeable = False
        self.p = p
        self.a = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray, p: int) -> "FpMatrix":
        # trusted path: arr already reduced, caller gives up ownership
        obj = cls.__new__(cls)
        arr.flags.writeable = False
        obj.p = p
        obj.a = arr
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "FpMatrix":
        return cls._wrap(np.zeros((rows, cols), dtype=np.int64), _check_p(p))

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls._wrap(np.eye(n, dtype=np.int64), _check_p(p))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], rows: int, p: int) -> "FpMatrix":
        if len(cols) == 0:
            return cls.zeros(rows, 0, p)
        return cls(np.array(cols, dtype=np.int64).T, p)

    # shape ------------------------------------------------------------
    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def __repr__(self) -> str:
        return f"FpMatrix({self.a.tolist()}, p={self.p})"

    # arithmetic -------------------------------------------------------
    def _same_field(self, other: "FpMatrix") -> None:
        if self.p != other.p:
            raise FieldError(f"modulus mismatch: {self.p} vs {other.p}")

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        self._same_field(other)
        return FpMatrix._wrap(matmul(self.a, other.a, self.p), self.p)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        self._same_field(other)
        return FpMatrix._wrap((self.a + other.a) % self.p, self.p)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        self._same_field(other)
        return FpMatrix._wrap((self.a - other.a) % self.p, self.p)

    def __neg__(self) -> "FpMatrix":
        return FpMatrix._wrap((-self.a) % self.p, self.p)

    def scale(self, c: int) -> "FpMatrix":
        return FpMatrix._wrap((self.a * (c % self.p)) % self.p, self.p)

    def __pow__(self, n: int) -> "FpMatrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        if n < 0:
            return inverse(self) ** (-n)
        out = np.eye(self.rows, dtype=np.int64)
        base = self.a
        while n:
            if n & 1:
                out = matmul(out, base, self.p)
            base = matmul(base, base, self.p)
            n >>= 1
        return FpMatrix._wrap(out, self.p)

    @property
    def T(self) -> "FpMatrix":
        return FpMatrix._wrap(self.a.T.copy(), self.p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and self.a.shape == other.a.shape and bool(np.array_equal(self.a, other.a))

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.a.any()

    def hstack(self, *others: "FpMatrix") -> "FpMatrix":
        for o in others:
            self._same_field(o)
        return FpMatrix._wrap(np.hstack([self.a] + [o.a for o in others]), self.p)

    def vstack(self, *others: "FpMatrix") -> "FpMatrix":
        for o in others:
            self._same_field(o)
        return FpMatrix._wrap(np.vstack([self.a] + [o.a for o in others]), self.p)

    def column(self, j: int) -> np.ndarray:
        return self.a[:, j].copy()

    # elimination shortcuts --------------------------------------------
    @property
    def rank(self) -> int:
        return rank(self)

    def rref(self):
        return rref(self)

    def kernel(self) -> "FpMatrix":
        return kernel_basis(self)


# ----------------------------------------------------------------------
# raw ndarray kernels; all inputs/outputs reduced mod p


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # float64 BLAS is exact while inner_dim * (p-1)^2 < 2^53
    if a.shape[1] * (p - 1) ** 2 < 2 ** 52:
        return (a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % p
    return (a @ b) % p


def rref_array(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``a`` (copied) and its pivot columns."""
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    inv = inverse_table(p)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv], c:] = a[[piv, r], c:]
        lead = int(a[r, c])
        if lead != 1:
            a[r, c:] = (a[r, c:] * inv[lead]) % p
        col = a[:, c]
        others = np.flatnonzero(col)
        others = others[others != r]
        if others.size:
            a[others, c:] = (a[others, c:] - np.outer(col[others], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank_array(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    # eliminate along the shorter side
    if a.shape[0] > a.shape[1]:
        a = a.T
    return len(rref_array(a, p)[1])


def kernel_array(a: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the right kernel; rows at free columns form an identity."""
    rows, cols = a.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    r, pivots = rref_array(a, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    k = np.zeros((cols, len(free)), dtype=np.int64)
    if not free:
        return k
    rank_ = len(pivots)
    k[free, range(len(free))] = 1
    if rank_:
        k[pivots, :] = (-r[:rank_, free]) % p
    return k


def column_basis_array(a: np.ndarray, p: int) -> np.ndarray:
    """A maximal independent subset of the columns of ``a`` (first-come order)."""
    if a.shape[1] == 0:
        return a.copy()
    _, pivots = rref_array(a, p)
    return a[:, pivots].copy()


def solve_array(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Some X with aX = b, or None."""
    rows, cols = a.shape
    aug = np.hstack([a, b]) % p
    r, pivots = rref_array(aug, p)
    if any(c >= cols for c in pivots):
        return None
    x = np.zeros((cols, b.shape[1]), dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = r[i, cols:]
    return x


def inverse_array(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    r, pivots = rref_array(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)) or (len(pivots) > n):
        raise ZeroDivisionError("matrix is singular")
    return r[:, n:].copy()


def left_inverse_rows(basis: np.ndarray, p: int) -> tuple[list[int], np.ndarray]:
    """Rows R where ``basis[R]`` is invertible, plus that inverse.

    Coordinates of a vector v in span(basis) are ``inv @ v[R]``.
    """
    _, rows = rref_array(basis.T, p)
    sq = basis[rows, :]
    return rows, inverse_array(sq, p)


# ----------------------------------------------------------------------
# FpMatrix-level operations


def rref(m: FpMatrix) -> tuple[FpMatrix, tuple[int, ...], int]:
    """Reduced row-echelon form, pivot columns and rank."""
    r, piv = rref_array(m.a, m.p)
    return FpMatrix._wrap(r, m.p), tuple(piv), len(piv)


def rank(m: FpMatrix) -> int:
    return rank_array(m.a, m.p)


def kernel_basis(m: FpMatrix) -> FpMatrix:
    """Matrix whose columns form a basis of the right kernel of ``m``."""
    return FpMatrix._wrap(kernel_array(m.a, m.p), m.p)


def solve(a: FpMatrix, b: FpMatrix) -> FpMatrix | None:
    """Return some X with ``a @ X == b``, or None if the system is inconsistent."""
    a._same_field(b)
    if a.rows != b.rows:
        raise ValueError(f"row mismatch: {a.rows} vs {b.rows}")
    x = solve_array(a.a, b.a, a.p)
    if x is None:
        return None
    out = FpMatrix._wrap(x, a.p)
    assert a @ out == b
    return out


def inverse(m: FpMatrix) -> FpMatrix:
    return FpMatrix._wrap(inverse_array(m.a, m.p), m.p)


def column_basis(m: FpMatrix) -> FpMatrix:
    return FpMatrix._wrap(column_basis_array(m.a, m.p), m.p)


def in_span(basis: FpMatrix, v: FpMatrix) -> bool:
    """Whether every column of ``v`` lies in the column span of ``basis``."""
    if v.cols == 0:
        return True
    if basis.cols == 0:
        return v.is_zero()
    return rank_array(np.hstack([basis.a, v.a]), basis.p) == rank_array(basis.a, basis.p)


def block_diag(blocks: Iterable[FpMatrix], p: int) -> FpMatrix:
    blocks = list(blocks)
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for b in blocks:
        out[r:r + b.rows, c:c + b.cols] = b.a
        r += b.rows
        c += b.cols
    return FpMatrix._wrap(out, p)
