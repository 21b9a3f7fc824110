"""
Dense linear algebra over the prime fields GF(p).

Subspaces are represented by their reduced row-echelon basis, which is unique
per subspace, so two bases describe the same subspace iff they are equal.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Iterator

import numpy as np

from .exceptions import InputError

SUPPORTED_PRIMES = (2, 3)


def _check_prime(p: int) -> None:
    if p not in SUPPORTED_PRIMES:
        raise InputError(f"Unsupported field size q={p}, expected one of {SUPPORTED_PRIMES}")


def rref_mod(matrix, p: int) -> tuple[np.ndarray, list[int]]:
    """Row-reduce over GF(p).

    Returns:
        (R, pivot_cols): reduced row-echelon form (zero rows last) and the
        pivot column of each nonzero row.
    """
    _check_prime(p)
    R = (np.array(matrix, dtype=np.int64) % p).copy()
    if R.ndim != 2:
        raise InputError(f"Expected a 2-d matrix, got shape {R.shape}")
    m, n = R.shape
    pivot_cols: list[int] = []
    pivot_row = 0

    for col in range(n):
        if pivot_row == m:
            break
        nonzero = np.nonzero(R[pivot_row:, col])[0]
        if nonzero.size == 0:
            continue
        found = pivot_row + int(nonzero[0])
        if found != pivot_row:
            R[[pivot_row, found]] = R[[found, pivot_row]]

        inv = pow(int(R[pivot_row, col]), -1, p)
        R[pivot_row] = (R[pivot_row] * inv) % p
        for row in range(m):
            if row != pivot_row and R[row, col]:
                R[row] = (R[row] - R[row, col] * R[pivot_row]) % p

        pivot_cols.append(col)
        pivot_row += 1

    return R, pivot_cols


def rank_mod(matrix, p: int) -> int:
    _, pivot_cols = rref_mod(matrix, p)
    return len(pivot_cols)


def intersection_dimension(a: np.ndarray, b: np.ndarray, p: int) -> int:
    """dim(rowspace(a) ∩ rowspace(b)) via dim U + dim W − dim(U + W)."""
    return rank_mod(a, p) + rank_mod(b, p) - rank_mod(np.vstack([a, b]), p)


def enumerate_subspaces(p: int, v: int, k: int) -> Iterator[np.ndarray]:
    """Yield the RREF basis of every k-dimensional subspace of GF(p)^v.

    Bases come out ordered by pivot set (lexicographic), then by the values of
    the free entries.
    """
    _check_prime(p)
    if not 0 <= k <= v:
        raise InputError(f"Subspace dimension must lie in [0, {v}], got {k}")

    for pivots in combinations(range(v), k):
        pivot_set = set(pivots)
        free = [
            (i, j)
            for i in range(k)
            for j in range(pivots[i] + 1, v)
            if j not in pivot_set
        ]
        for values in product(range(p), repeat=len(free)):
            basis = np.zeros((k, v), dtype=np.int64)
            for i, col in enumerate(pivots):
                basis[i, col] = 1
            for (i, j), value in zip(free, values):
                basis[i, j] = value
            yield basis
