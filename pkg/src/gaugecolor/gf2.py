"""Dense linear algebra over GF(2) on ``uint8`` numpy arrays.

Every routine pivots on the lowest available column and, within a column, on
the lowest available row, so results are reproducible across runs.
"""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

BitMatrix = npt.NDArray[np.uint8]


def as_bits(a, ncols: int | None = None) -> BitMatrix:
    """Coerce ``a`` to a 2D ``uint8`` array with entries in {0, 1}."""
    m = np.asarray(a, dtype=np.uint8) & 1
    if m.ndim == 1:
        m = m.reshape(1, -1) if m.size else m.reshape(0, ncols or 0)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if ncols is not None and m.shape[1] != ncols:
        raise ValueError(f"expected {ncols} columns, got {m.shape[1]}")
    return m


def rref(a) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form and pivot columns.

    The returned matrix keeps the input's shape; zero rows sit at the bottom.
    """
    m = as_bits(a).copy()
    nrows, ncols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        hits = np.flatnonzero(m[r:, c])
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            m[[r, p]] = m[[p, r]]
        ones = np.flatnonzero(m[:, c])
        ones = ones[ones != r]
        if ones.size:
            m[ones] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a) -> int:
    return len(rref(a)[1])


def row_basis(a) -> BitMatrix:
    """Rows of the RREF spanning the row space of ``a``."""
    m, piv = rref(a)
    return m[: len(piv)]


def nullspace(a) -> BitMatrix:
    """Basis (as rows) of ``{x : a @ x = 0}``."""
    m, piv = rref(a)
    ncols = m.shape[1]
    pivset = set(piv)
    free = [c for c in range(ncols) if c not in pivset]
    out = np.zeros((len(free), ncols), dtype=np.uint8)
    out[np.arange(len(free)), free] = 1
    if piv and free:
        out[:, piv] = m[: len(piv)][:, free].T
    return out


def solve(a, b) -> BitMatrix | None:
    """A particular solution of ``a @ x = b``, or ``None`` when inconsistent.

    Free variables are set to zero.
    """
    a = as_bits(a)
    b = np.asarray(b, dtype=np.uint8).reshape(-1) & 1
    if a.shape[0] != b.size:
        raise ValueError("row count of a and length of b differ")
    aug = np.concatenate([a, b[:, None]], axis=1)
    m, piv = rref(aug)
    ncols = a.shape[1]
    if piv and piv[-1] == ncols:
        return None
    x = np.zeros(ncols, dtype=np.uint8)
    for r, p in enumerate(piv):
        x[p] = m[r, ncols]
    return x


def combination(rows, v) -> BitMatrix | None:
    """Coefficients ``c`` with ``c @ rows = v``, or ``None`` if ``v`` is outside the row space."""
    rows = as_bits(rows)
    return solve(rows.T, v)


def in_rowspace(v, rows) -> bool:
    rows = as_bits(rows)
    v = np.asarray(v, dtype=np.uint8).reshape(-1) & 1
    if rows.shape[0] == 0:
        return not v.any()
    return rank(rows) == rank(np.vstack([rows, v]))


def rowspace_contains(big, small) -> bool:
    """True iff every row of ``small`` lies in the row space of ``big``."""
    small = as_bits(small)
    if small.shape[0] == 0:
        return True
    big = as_bits(big, small.shape[1])
    return rank(big) == rank(np.vstack([big, small]))


def rowspace_equal(a, b) -> bool:
    a, b = as_bits(a), as_bits(b)
    if a.shape[1] != b.shape[1]:
        return False
    ra, rb = rank(a), rank(b)
    return ra == rb and rank(np.vstack([a, b])) == ra


def rowspace_intersection(a, b) -> BitMatrix:
    """Basis of ``rowspace(a) ∩ rowspace(b)``."""
    a, b = as_bits(a), as_bits(b)
    ncols = max(a.shape[1], b.shape[1])
    a = a.reshape(-1, ncols) if a.size else np.zeros((0, ncols), np.uint8)
    b = b.reshape(-1, ncols) if b.size else np.zeros((0, ncols), np.uint8)
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((0, ncols), dtype=np.uint8)
    ab, bb = row_basis(a), row_basis(b)
    # (u, w) with u·ab = w·bb  <=>  [ab; bb]^T (u, w) = 0
    ker = nullspace(np.vstack([ab, bb]).T)
    if ker.shape[0] == 0:
        return np.zeros((0, ncols), dtype=np.uint8)
    vecs = (ker[:, : ab.shape[0]].astype(np.int64) @ ab) & 1
    return row_basis(vecs.astype(np.uint8))


def inverse(a) -> BitMatrix:
    """Inverse of a square invertible matrix; raises ``ValueError`` otherwise."""
    a = as_bits(a)
    n, m = a.shape
    if n != m:
        raise ValueError("matrix is not square")
    aug = np.concatenate([a, np.eye(n, dtype=np.uint8)], axis=1)
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular over GF(2)")
    return red[:, n:].copy()


def matmul(a, b) -> BitMatrix:
    return ((np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) & 1).astype(np.uint8)
