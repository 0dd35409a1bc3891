"""Dense linear algebra over GF(2).

Matrices are plain ``numpy`` arrays of dtype ``uint8`` holding 0/1 entries.
Elimination runs on rows packed into 64-bit words; callers never see the
packing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from qef._backend import kernels

BitMatrix = npt.NDArray[np.uint8]


class NoSolution(ValueError):
    """Some right-hand-side column lies outside the column space."""

    def __init__(self, columns: list[int]):
        self.columns = columns
        super().__init__(f"no solution for right-hand-side columns {columns}")


@dataclass(frozen=True)
class RrefResult:
    reduced: BitMatrix
    pivot_cols: tuple[int, ...]
    rank: int
    column_perm: tuple[int, ...]


def as_bits(m, cols: int | None = None) -> BitMatrix:
    """Coerce ``m`` to a 2-D uint8 matrix of bits.

    An empty sequence becomes a ``0 x cols`` matrix when ``cols`` is given.
    """
    arr = np.asarray(m)
    if arr.size == 0:
        ncols = cols if cols is not None else (arr.shape[1] if arr.ndim == 2 else 0)
        return np.zeros((arr.shape[0] if arr.ndim == 2 else 0, ncols), dtype=np.uint8)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    return (arr.astype(np.int64) & 1).astype(np.uint8)


def identity(n: int) -> BitMatrix:
    return np.eye(n, dtype=np.uint8)


def zeros(rows: int, cols: int) -> BitMatrix:
    return np.zeros((rows, cols), dtype=np.uint8)


def matmul(a, b) -> BitMatrix:
    a, b = as_bits(a), as_bits(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    return ((a.astype(np.int64) @ b.astype(np.int64)) & 1).astype(np.uint8)


def pack_rows(m: BitMatrix) -> np.ndarray:
    rows, cols = m.shape
    nw = max(1, (cols + 63) // 64)
    padded = np.zeros((rows, nw * 64), dtype=np.uint8)
    padded[:, :cols] = m
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed.view("<u8").astype(np.uint64))


def unpack_rows(words: np.ndarray, cols: int) -> BitMatrix:
    raw = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    bits = np.unpackbits(raw, axis=1, bitorder="little")
    return bits[:, :cols].astype(np.uint8)


def _eliminate(m: BitMatrix, pivot_limit: int | None = None) -> tuple[BitMatrix, list[int]]:
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return m.copy(), []
    words = pack_rows(m)
    pivots = kernels.rref_words(words, cols, cols if pivot_limit is None else pivot_limit)
    return unpack_rows(words, cols), list(pivots)


def rref(m, allow_column_swaps: bool = False) -> RrefResult:
    """Reduced row-echelon form.

    With ``allow_column_swaps`` the pivot columns are moved to the front (in
    their original order, followed by the remaining columns) and the applied
    permutation is returned; ``reduced[:, j]`` then corresponds to original
    column ``column_perm[j]``.
    """
    m = as_bits(m)
    reduced, pivots = _eliminate(m)
    perm = tuple(range(m.shape[1]))
    if allow_column_swaps:
        rest = [c for c in range(m.shape[1]) if c not in set(pivots)]
        perm = tuple(pivots + rest)
        reduced = reduced[:, list(perm)]
        pivots = list(range(len(pivots)))
    return RrefResult(reduced, tuple(pivots), len(pivots), perm)


def rank(m) -> int:
    return len(_eliminate(as_bits(m))[1])


def solve(a, b) -> BitMatrix:
    """Return X with ``a @ X == b``; free variables are set to zero.

    Raises NoSolution listing the offending columns of ``b``.
    """
    a, b = as_bits(a), as_bits(b)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"row mismatch: {a.shape[0]} vs {b.shape[0]}")
    n = a.shape[1]
    aug = np.concatenate([a, b], axis=1)
    reduced, pivots = _eliminate(aug, pivot_limit=n)
    r = len(pivots)
    leftover = reduced[r:, n:]
    bad = np.nonzero(leftover.any(axis=0))[0].tolist()
    if bad:
        raise NoSolution(bad)
    x = zeros(n, b.shape[1])
    for row, c in enumerate(pivots):
        x[c] = reduced[row, n:]
    return x


def nullspace(a) -> BitMatrix:
    """Basis of {x : a @ x == 0}, one vector per row, ordered by free column."""
    a = as_bits(a)
    n = a.shape[1]
    reduced, pivots = _eliminate(a)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = zeros(len(free), n)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for row, c in enumerate(pivots):
            basis[k, c] = reduced[row, f]
    return basis


def rank_factorize(m) -> tuple[BitMatrix, BitMatrix]:
    """Split ``m`` (r x s) into ``p`` (r x c) and ``q`` (c x s), c = rank(m)."""
    m = as_bits(m)
    reduced, pivots = _eliminate(m)
    q = reduced[: len(pivots)].copy()
    p = m[:, pivots].copy() if pivots else zeros(m.shape[0], 0)
    return p, q


def row_space_equal(a, b) -> bool:
    a, b = as_bits(a), as_bits(b)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"width mismatch: {a.shape[1]} vs {b.shape[1]}")
    ra, rb = rank(a), rank(b)
    return ra == rb == rank(np.concatenate([a, b], axis=0))


def in_row_space(v, m) -> bool:
    m = as_bits(m)
    v = as_bits(v, cols=m.shape[1])
    return rank(np.concatenate([m, v], axis=0)) == rank(m)


def independent_rows(m) -> BitMatrix:
    """Nonzero rows of the reduced form: a basis of the row space."""
    res = rref(m)
    return res.reduced[: res.rank].copy()
