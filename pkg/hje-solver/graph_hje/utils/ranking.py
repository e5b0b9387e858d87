"""Combinatorial ranking of nondecreasing integer tuples.

A nondecreasing tuple 0 <= a_1 <= ... <= a_m <= N maps to the strictly
increasing tuple c_l = a_l + (l - 1) in {0, ..., N + m - 1}, i.e. an m-subset.
Subsets are ranked in colexicographic order, rank(c) = sum_l C(c_l, l), which
gives a dense bijection onto {0, ..., C(N + m, m) - 1}.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def binomial_table(n_max: int, k_max: int) -> np.ndarray:
    """table[n, k] = C(n, k) for 0 <= n <= n_max, 0 <= k <= k_max."""
    table = np.zeros((n_max + 1, k_max + 1), dtype=np.int64)
    for n in range(n_max + 1):
        for k in range(min(n, k_max) + 1):
            table[n, k] = math.comb(n, k)
    table.setflags(write=False)
    return table


def tuple_count(levels: int, length: int) -> int:
    """Number of nondecreasing tuples of the given length over {0, ..., levels}."""
    return math.comb(levels + length, length)


def is_admissible(tuples: np.ndarray, levels: int) -> np.ndarray:
    """Whether each row of an integer array is nondecreasing within [0, levels]."""
    tuples = np.asarray(tuples)
    in_range = np.all((tuples >= 0) & (tuples <= levels), axis=-1)
    if tuples.shape[-1] < 2:
        return in_range
    ordered = np.all(np.diff(tuples, axis=-1) >= 0, axis=-1)
    return in_range & ordered


def rank_tuples(tuples: np.ndarray, levels: int) -> np.ndarray:
    """Colex ranks of admissible tuples; inadmissible rows rank as -1."""
    tuples = np.asarray(tuples, dtype=np.int64)
    length = tuples.shape[-1]
    table = binomial_table(levels + length, length)
    admissible = is_admissible(tuples, levels)
    shifted = np.where(admissible[..., None], tuples, 0) + np.arange(length)
    ranks = np.zeros(tuples.shape[:-1], dtype=np.int64)
    for slot in range(length):
        ranks += table[shifted[..., slot], slot + 1]
    return np.where(admissible, ranks, -1)


def enumerate_tuples(levels: int, length: int) -> np.ndarray:
    """All nondecreasing tuples over {0, ..., levels}, row r having rank r."""
    rows = np.array(
        list(itertools.combinations_with_replacement(range(levels + 1), length)),
        dtype=np.int64,
    ).reshape(-1, length)
    ordered = np.empty_like(rows)
    ordered[rank_tuples(rows, levels)] = rows
    return ordered
