"""Bookkeeping for the strict upper triangle of d x d matrices.

Pairs (j, k) with j < k are stored in row-major order
(1,2), (1,3), ..., (1,d), (2,3), ..., (d-1,d). All indices returned here are
0-based; public modules translate to 1-based labels where they report them.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _upper_pairs(d: int) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = np.triu_indices(d, k=1)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def upper_pairs(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column indices of the strict upper triangle."""
    return _upper_pairs(int(d))


def pair_count(d: int) -> int:
    return d * (d - 1) // 2


def pair_position(d: int, j: int, k: int) -> int:
    """Position of the 1-based pair (j, k), j < k, in upper-triangle order."""
    if not 1 <= j < k <= d:
        raise ValueError(f"Pair ({j}, {k}) must satisfy 1 <= j < k <= {d}.")
    j0 = j - 1
    return j0 * d - j0 * (j0 + 1) // 2 + (k - j - 1)


@lru_cache(maxsize=None)
def _pair_incidence(d: int) -> np.ndarray:
    rows, cols = upper_pairs(d)
    incidence = np.zeros((rows.size, d))
    incidence[np.arange(rows.size), rows] = -1.0
    incidence[np.arange(rows.size), cols] = 1.0
    incidence.setflags(write=False)
    return incidence


def pair_incidence(d: int) -> np.ndarray:
    """(m, d) matrix sending a pair flux to -1 at its first and +1 at its second vertex."""
    return _pair_incidence(int(d))


def upper_to_matrix(upper: np.ndarray, d: int) -> np.ndarray:
    """Expand upper-triangle values (..., m) into skew-symmetric matrices (..., d, d)."""
    upper = np.asarray(upper, dtype=float)
    rows, cols = upper_pairs(d)
    out = np.zeros(upper.shape[:-1] + (d, d))
    out[..., rows, cols] = upper
    out[..., cols, rows] = -upper
    return out


def matrix_to_upper(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    rows, cols = upper_pairs(matrix.shape[-1])
    return matrix[..., rows, cols]
