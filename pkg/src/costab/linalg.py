"""Exact linear algebra on object-dtype numpy matrices.

Entries are field elements (``Fraction`` or ``Fp``); nothing here ever
touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import Field


class ShapeError(ValueError):
    pass


def matmul(a: np.ndarray, b: np.ndarray, field: Field) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
        return field.zeros(a.shape[0], b.shape[1])
    return a.dot(b)


def is_zero(m: np.ndarray) -> bool:
    return all(x == 0 for x in m.flat)


def rref(m: np.ndarray, field: Field) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    r = m.copy()
    rows, cols = r.shape
    pivots: list[int] = []
    pr = 0
    for c in range(cols):
        if pr >= rows:
            break
        sel = None
        for i in range(pr, rows):
            if r[i, c] != 0:
                sel = i
                break
        if sel is None:
            continue
        if sel != pr:
            r[[pr, sel]] = r[[sel, pr]]
        inv = field.one / r[pr, c]
        r[pr] = r[pr] * inv
        for i in range(rows):
            if i != pr and r[i, c] != 0:
                r[i] = r[i] - r[pr] * r[i, c]
        pivots.append(c)
        pr += 1
    return r, pivots


def rank(m: np.ndarray, field: Field) -> int:
    if m.size == 0:
        return 0
    return len(rref(m, field)[1])


def nullspace(m: np.ndarray, field: Field) -> np.ndarray:
    """Basis of the kernel, as the columns of the returned matrix."""
    rows, cols = m.shape
    if rows == 0:
        return field.eye(cols)
    r, piv = rref(m, field)
    free = [c for c in range(cols) if c not in set(piv)]
    out = field.zeros(cols, len(free))
    for k, f in enumerate(free):
        out[f, k] = field.one
        for i, p in enumerate(piv):
            out[p, k] = -r[i, f]
    return out


def solve(a: np.ndarray, b: np.ndarray, field: Field):
    """Some exact solution x of a x = b, or None if inconsistent."""
    if b.ndim == 1:
        b = b.reshape(-1, 1)
        flat = True
    else:
        flat = False
    if a.shape[0] != b.shape[0]:
        raise ShapeError(f"matrix has {a.shape[0]} rows, right side {b.shape[0]}")
    cols = a.shape[1]
    aug = np.concatenate([a, b], axis=1) if a.shape[0] else field.zeros(0, cols + b.shape[1])
    r, piv = rref(aug, field)
    if any(p >= cols for p in piv):
        return None
    x = field.zeros(cols, b.shape[1])
    for i, p in enumerate(piv):
        x[p] = r[i, cols:]
    return x[:, 0] if flat else x


def inverse(m: np.ndarray, field: Field) -> np.ndarray:
    n, c = m.shape
    if n != c:
        raise ShapeError("inverse of non-square matrix")
    aug = np.concatenate([m, field.eye(n)], axis=1)
    r, piv = rref(aug, field)
    if len([p for p in piv if p < n]) != n:
        raise ZeroDivisionError("singular matrix")
    return r[:, n:]


def independent_columns(m: np.ndarray, field: Field) -> list[int]:
    """Indices of a maximal set of linearly independent columns (greedy, left to right)."""
    if m.shape[0] == 0:
        return []
    return rref(m, field)[1]


@dataclass
class ColumnSpace:
    """A matrix with independent columns plus a fast left inverse.

    ``coords(v)`` returns the coefficients of ``v`` in the column basis,
    or None when ``v`` is outside the span.
    """

    basis: np.ndarray
    field: Field

    def __post_init__(self):
        n, k = self.basis.shape
        self.dim = k
        if k == 0:
            self._rows = []
            self._left = self.field.zeros(0, 0)
            return
        rows = independent_columns(self.basis.T.copy(), self.field)
        if len(rows) != k:
            raise ValueError("columns are not independent")
        self._rows = rows
        self._left = inverse(self.basis[rows, :], self.field)

    def coords(self, v: np.ndarray):
        if self.dim == 0:
            return self.field.zeros(0, 1)[:, 0] if is_zero(v) else None
        x = self._left.dot(v[self._rows])
        if any(a != b for a, b in zip(self.basis.dot(x), v)):
            return None
        return x
