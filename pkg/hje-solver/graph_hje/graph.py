"""Finite weighted undirected graphs.

A Graph is validated once, at construction, so every downstream module may
assume symmetric nonnegative weights, an empty diagonal and a connected edge
set. Vertices are labelled 1..d in every public input and output.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from graph_hje.exceptions import (
    AsymmetricWeightsError,
    DisconnectedError,
    GraphValidationError,
    IndexOutOfRangeError,
    NegativeWeightError,
    SelfLoopError,
)
from graph_hje.utils.skew import upper_pairs

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Graph:
    """An undirected connected graph G = (V, E, omega) without self-loops.

    Attributes:
        d: Number of vertices.
        weights: Read-only d x d symmetric weight matrix.
    """

    d: int
    weights: np.ndarray = field(repr=False)

    @property
    def edge_mask(self) -> np.ndarray:
        """Boolean d x d matrix of edges (omega > 0)."""
        return self.weights > 0

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.weights)

    @property
    def pair_sqrt_weights(self) -> np.ndarray:
        """sqrt(omega_{j,k}) for every pair j < k, in upper-triangle order."""
        rows, cols = upper_pairs(self.d)
        return np.sqrt(self.weights[rows, cols])

    @property
    def pair_edge_mask(self) -> np.ndarray:
        rows, cols = upper_pairs(self.d)
        return self.weights[rows, cols] > 0

    @property
    def max_sqrt_weight(self) -> float:
        """The supremum norm of the matrix sqrt(omega)."""
        return float(self.sqrt_weights.max())

    def edges(self) -> tuple[tuple[int, int], ...]:
        """All edges (i, j) with i < j, 1-based."""
        rows, cols = upper_pairs(self.d)
        mask = self.weights[rows, cols] > 0
        return tuple((int(i) + 1, int(j) + 1) for i, j in zip(rows[mask], cols[mask]))


def new_graph(d: int, weights: ArrayLike) -> Graph:
    """Validate a weight matrix and build a Graph.

    Args:
        d: Vertex count, at least 2.
        weights: A d x d matrix, or a flat row-major sequence of d*d reals.

    Raises:
        GraphValidationError: If d < 2 or the matrix has the wrong shape.
        AsymmetricWeightsError, NegativeWeightError, SelfLoopError,
        DisconnectedError: If the corresponding invariant is violated.
    """
    if int(d) != d or d < 2:
        raise GraphValidationError(f"Vertex count must be an integer >= 2, got {d}.")
    d = int(d)
    matrix = np.array(weights, dtype=float)
    if matrix.ndim == 1 and matrix.size == d * d:
        matrix = matrix.reshape(d, d)
    if matrix.shape != (d, d):
        raise GraphValidationError(
            f"Weight matrix must be {d}x{d} (or {d * d} row-major values), got shape {matrix.shape}."
        )
    if not np.all(np.isfinite(matrix)):
        raise GraphValidationError("Weight matrix contains non-finite entries.")

    if not np.array_equal(matrix, matrix.T):
        i, j = np.argwhere(matrix != matrix.T)[0]
        raise AsymmetricWeightsError(
            f"Weights must be symmetric: omega[{i + 1}][{j + 1}]={matrix[i, j]} "
            f"but omega[{j + 1}][{i + 1}]={matrix[j, i]}."
        )
    if np.any(matrix < 0):
        i, j = np.argwhere(matrix < 0)[0]
        raise NegativeWeightError(
            f"Weights must be nonnegative: omega[{i + 1}][{j + 1}]={matrix[i, j]}."
        )
    diagonal = np.diag(matrix)
    if np.any(diagonal != 0):
        i = int(np.flatnonzero(diagonal)[0])
        raise SelfLoopError(
            f"Self-loops are not allowed: omega[{i + 1}][{i + 1}]={diagonal[i]}."
        )

    reached = breadth_first_order(
        csr_matrix(matrix > 0), i_start=0, directed=False, return_predecessors=False
    )
    if reached.size != d:
        missing = sorted(set(range(d)) - set(int(v) for v in reached))
        raise DisconnectedError(
            f"Graph must be connected: vertices {[v + 1 for v in missing]} "
            f"are unreachable from vertex 1."
        )

    matrix.setflags(write=False)
    logger.debug(f"Built graph with d={d} and {int(np.count_nonzero(matrix)) // 2} edges")
    return Graph(d=d, weights=matrix)


def complete_graph(d: int, weight: float = 1.0) -> Graph:
    """The complete graph on d vertices with uniform weight."""
    matrix = np.full((d, d), float(weight))
    np.fill_diagonal(matrix, 0.0)
    return new_graph(d, matrix)


def neighbors(g: Graph, i: int) -> Sequence[int]:
    """All vertices j with omega[i][j] > 0, in increasing order (1-based).

    Raises:
        IndexOutOfRangeError: If i is not in 1..d.
    """
    if int(i) != i or not 1 <= i <= g.d:
        raise IndexOutOfRangeError(f"Vertex {i} is outside 1..{g.d}.")
    return tuple(int(j) + 1 for j in np.flatnonzero(g.weights[int(i) - 1] > 0))
