"""Exact solutions of the pure-noise equation through the graph's Markov semigroup.

With the logarithmic tensor, zero Hamiltonian and zero potential, the equation
reduces to d_t u = O_xi(grad_W u), whose solution transports the initial data
along the Markov chain generated by the weight matrix:

    u(t, xi) = U0(exp(tA) xi),   A_{i,j} = omega_{i,j},  A_{i,i} = -sum_k omega_{i,k}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.linalg import eigh

from graph_hje.exceptions import ConfigurationError
from graph_hje.graph import Graph
from graph_hje.simplex_mesh import PointLike, as_coords


@dataclass(frozen=True, eq=False)
class MarkovGenerator:
    """A symmetric Q-matrix with its spectral decomposition.

    Attributes:
        matrix: A, zero row sums.
        eigenvalues: Spectrum of A (nonpositive).
        eigenvectors: Orthonormal eigenvectors, one per column.
    """

    matrix: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return int(self.matrix.shape[0])


def generator(g: Graph) -> MarkovGenerator:
    """A_{i,j} = omega_{i,j} off the diagonal; the diagonal is the negated row sum."""
    matrix = np.array(g.weights, dtype=float)
    np.fill_diagonal(matrix, 0.0)
    np.fill_diagonal(matrix, -matrix.sum(axis=1))
    eigenvalues, eigenvectors = eigh(matrix)
    for array in (matrix, eigenvalues, eigenvectors):
        array.setflags(write=False)
    return MarkovGenerator(matrix=matrix, eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def transition(gen: MarkovGenerator, t: float) -> np.ndarray:
    """exp(tA) from the symmetric eigendecomposition of A.

    Raises:
        ConfigurationError: If t is negative.
    """
    if t < 0:
        raise ConfigurationError(f"Transition matrices need t >= 0, got {t}.")
    vectors = gen.eigenvectors
    return (vectors * np.exp(t * gen.eigenvalues)) @ vectors.T


def evolve(gen: MarkovGenerator, t: float, xi: PointLike) -> np.ndarray:
    """exp(tA) xi for a point (d,) or a batch of points (n, d)."""
    # exp(tA) is symmetric, so row vectors may be multiplied from the right.
    return as_coords(xi) @ transition(gen, t)


def exact_noise_solution(
    gen: MarkovGenerator, U0: Callable[[np.ndarray], np.ndarray], t: float, xi: PointLike
) -> Union[float, np.ndarray]:
    """U0(exp(tA) xi); batches of points give an array of values."""
    value = np.asarray(U0(evolve(gen, t, xi)), dtype=float)
    return float(value) if value.ndim == 0 else value
