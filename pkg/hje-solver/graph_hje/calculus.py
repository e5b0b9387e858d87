"""Calculus on the Wasserstein space over a graph.

Skew-symmetric fields are stored by their strict upper triangle (see
``graph_hje.utils.skew``). Every function here broadcasts over leading axes:
a batch of n points is an (n, d) array and a batch of fields an (n, m) array,
m = d(d-1)/2, which is how the schemes evaluate all mesh nodes at once.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

from graph_hje.exceptions import (
    CalculusError,
    NegativeArgumentError,
    SingularLogAtBoundaryError,
    ZeroCoordinateError,
)
from graph_hje.graph import Graph
from graph_hje.simplex_mesh import PointLike, as_coords
from graph_hje.utils.skew import (
    matrix_to_upper,
    pair_count,
    pair_incidence,
    upper_pairs,
    upper_to_matrix,
)


@dataclass(frozen=True, eq=False)
class SkewField:
    """A skew-symmetric d x d matrix, p_{k,j} = -p_{j,k}, kept as its upper triangle."""

    d: int
    upper: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        upper = np.array(self.upper, dtype=float)
        if upper.shape[-1:] != (pair_count(self.d),):
            raise CalculusError(
                f"A skew field on {self.d} vertices needs {pair_count(self.d)} upper entries, "
                f"got shape {upper.shape}."
            )
        upper.setflags(write=False)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def zeros(cls, d: int) -> SkewField:
        return cls(d, np.zeros(pair_count(d)))

    @classmethod
    def from_matrix(cls, matrix: ArrayLike) -> SkewField:
        matrix = np.asarray(matrix, dtype=float)
        if not np.allclose(matrix, -np.swapaxes(matrix, -1, -2), rtol=0.0, atol=1e-12):
            raise CalculusError("Matrix is not skew-symmetric.")
        return cls(matrix.shape[-1], matrix_to_upper(matrix))

    @classmethod
    def from_pairs(cls, d: int, entries: dict[tuple[int, int], float]) -> SkewField:
        """Build a field from 1-based {(j, k): value} entries; (k, j) keys are negated."""
        matrix = np.zeros((d, d))
        for (j, k), value in entries.items():
            matrix[j - 1, k - 1] = value
            matrix[k - 1, j - 1] = -value
        return cls(d, matrix_to_upper(matrix))

    def to_matrix(self) -> np.ndarray:
        return upper_to_matrix(self.upper, self.d)

    def entry(self, j: int, k: int) -> float:
        return float(self.to_matrix()[j - 1, k - 1])


FieldLike = Union[SkewField, ArrayLike]


def as_upper(v: FieldLike) -> np.ndarray:
    if isinstance(v, SkewField):
        return v.upper
    return np.asarray(v, dtype=float)


# ===== Metric tensors =====


class MetricTensor(abc.ABC):
    """A symmetric weight g(t, r) on [0, inf)^2 with min(t, r) <= g <= max(t, r)."""

    kind: str

    @abc.abstractmethod
    def _evaluate(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        ...

    @abc.abstractmethod
    def _log_product(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        ...

    def __call__(self, t: ArrayLike, r: ArrayLike) -> np.ndarray:
        t, r = _check_nonnegative(t, r)
        return self._evaluate(t, r)

    def log_product(self, t: ArrayLike, r: ArrayLike) -> np.ndarray:
        """g(t, r) * (log t - log r), continuously extended where possible.

        Raises:
            SingularLogAtBoundaryError: If an argument is 0 and the tensor has no
                continuous extension there.
        """
        t, r = _check_nonnegative(t, r)
        return self._log_product(t, r)


def _check_nonnegative(t: ArrayLike, r: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(t < 0) or np.any(r < 0):
        raise NegativeArgumentError(
            f"Metric tensors are defined on [0, inf)^2, got min arguments {np.min(t)}, {np.min(r)}."
        )
    return np.broadcast_arrays(t, r)


def _log_ratio(t: np.ndarray, r: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(t) - np.log(r)


@dataclass(frozen=True)
class AverageTensor(MetricTensor):
    kind = "average"

    def _evaluate(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        return 0.5 * (t + r)

    def _log_product(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        if np.any((t == 0) | (r == 0)):
            raise SingularLogAtBoundaryError(
                "The average tensor has no continuous extension of g*(log t - log r) at a zero "
                "coordinate.\nEvaluate the noise term at points of P_eps with eps > 0, or use the "
                "logarithmic or harmonic tensor."
            )
        return self._evaluate(t, r) * _log_ratio(t, r)


@dataclass(frozen=True)
class LogarithmicTensor(MetricTensor):
    """g(t, r) = (t - r)/(log t - log r), with g(t, t) = t and g = 0 on the axes."""

    kind = "logarithmic"

    def _evaluate(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        positive = (t > 0) & (r > 0)
        distinct = positive & (t != r)
        safe_r = np.where(distinct, r, 1.0)
        gap = np.where(distinct, t - r, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            mean = gap / np.log1p(gap / safe_r)
        return np.where(distinct, mean, np.where(positive, t, 0.0))

    def _log_product(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        return t - r


@dataclass(frozen=True)
class HarmonicTensor(MetricTensor):
    """g(t, r) = 2/(1/t + 1/r), zero when either argument is 0."""

    kind = "harmonic"

    def _evaluate(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        positive = (t > 0) & (r > 0)
        total = np.where(positive, t + r, 1.0)
        return np.where(positive, 2.0 * t * r / total, 0.0)

    def _log_product(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        positive = (t > 0) & (r > 0)
        ratio = _log_ratio(np.where(positive, t, 1.0), np.where(positive, r, 1.0))
        return np.where(positive, self._evaluate(t, r) * ratio, 0.0)


@dataclass(frozen=True)
class ConvexCombinationTensor(MetricTensor):
    """A convex combination of the average, logarithmic and harmonic tensors."""

    weights: tuple[float, float, float]
    kind = "convex_combination"

    def __post_init__(self) -> None:
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != 3 or any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
            raise CalculusError(
                f"Convex combination weights must be 3 nonnegative numbers summing to 1, got {self.weights}."
            )
        object.__setattr__(self, "weights", weights)

    @property
    def parts(self) -> tuple[tuple[float, MetricTensor], ...]:
        bases = (AverageTensor(), LogarithmicTensor(), HarmonicTensor())
        return tuple((w, base) for w, base in zip(self.weights, bases) if w > 0)

    def _evaluate(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        return sum(w * base._evaluate(t, r) for w, base in self.parts)

    def _log_product(self, t: np.ndarray, r: np.ndarray) -> np.ndarray:
        return sum(w * base._log_product(t, r) for w, base in self.parts)


TENSORS: dict[str, MetricTensor] = {
    "average": AverageTensor(),
    "logarithmic": LogarithmicTensor(),
    "harmonic": HarmonicTensor(),
}


def tensor_by_name(name: str, weights: Sequence[float] = ()) -> MetricTensor:
    """Look up a builtin tensor; ``convex_combination`` takes its three weights."""
    if name == "convex_combination":
        return ConvexCombinationTensor(tuple(weights))
    try:
        return TENSORS[name]
    except KeyError:
        raise CalculusError(
            f"Unknown metric tensor {name!r}. Known tensors: "
            f"{', '.join(sorted([*TENSORS, 'convex_combination']))}."
        ) from None


def metric_eval(mt: MetricTensor, t: float, r: float) -> float:
    """g(t, r) for scalars.

    Raises:
        NegativeArgumentError: If t or r is negative.
    """
    return float(mt(t, r))


# ===== Operators =====


def pair_metric(g: Graph, mt: MetricTensor, xi: PointLike) -> np.ndarray:
    """g_{j,k}(xi) for every pair, zeroed on non-edges. Shape (..., m)."""
    coords = as_coords(xi)
    rows, cols = upper_pairs(g.d)
    return mt(coords[..., rows], coords[..., cols]) * g.pair_edge_mask


def pair_log_product(g: Graph, mt: MetricTensor, xi: PointLike) -> np.ndarray:
    """sqrt(omega_{j,k}) * g_{j,k}(xi) * (log xi_j - log xi_k) for every pair. Shape (..., m)."""
    coords = as_coords(xi)
    rows, cols = upper_pairs(g.d)
    mask = g.pair_edge_mask
    t = np.where(mask, coords[..., rows], 1.0)
    r = np.where(mask, coords[..., cols], 1.0)
    return g.pair_sqrt_weights * np.where(mask, mt.log_product(t, r), 0.0)


def graph_gradient(g: Graph, phi: ArrayLike) -> SkewField:
    """(grad_G phi)_{j,k} = sqrt(omega_{j,k}) * (phi_j - phi_k)."""
    phi = np.asarray(phi, dtype=float)
    rows, cols = upper_pairs(g.d)
    return SkewField(g.d, g.pair_sqrt_weights * (phi[..., rows] - phi[..., cols]))


def inner_product(
    g: Graph, mt: MetricTensor, xi: PointLike, v: FieldLike, w: FieldLike
) -> Union[float, np.ndarray]:
    """(v, w)_xi = sum over edges j < k of v_{j,k} w_{j,k} g_{j,k}(xi)."""
    value = np.sum(as_upper(v) * as_upper(w) * pair_metric(g, mt, xi), axis=-1)
    return float(value) if np.ndim(value) == 0 else value


def norm(g: Graph, mt: MetricTensor, xi: PointLike, v: FieldLike) -> Union[float, np.ndarray]:
    return np.sqrt(inner_product(g, mt, xi, v, v))


def l2_norm(v: FieldLike) -> Union[float, np.ndarray]:
    """Frobenius norm of the full skew matrix, sqrt(2 * sum_{j<k} p_{j,k}^2)."""
    value = np.sqrt(2.0 * np.sum(as_upper(v) ** 2, axis=-1))
    return float(value) if np.ndim(value) == 0 else value


def divergence(g: Graph, mt: MetricTensor, xi: PointLike, v: FieldLike) -> np.ndarray:
    """div_xi(v)_i = sum_j sqrt(omega_{i,j}) v_{j,i} g_{i,j}(xi).

    Adjoint to the graph gradient: (grad_G phi, v)_xi = -<phi, div_xi(v)>.
    """
    flux = g.pair_sqrt_weights * pair_metric(g, mt, xi) * as_upper(v)
    return flux @ pair_incidence(g.d)


def noise_term(g: Graph, mt: MetricTensor, xi: PointLike, p: FieldLike) -> Union[float, np.ndarray]:
    """O_xi(p) = -(p, grad_G log xi)_xi.

    The product g * (log xi_j - log xi_k) is taken from the tensor's continuous
    extension, so the logarithmic tensor reduces it to xi_j - xi_k exactly.

    Raises:
        SingularLogAtBoundaryError: If xi has a zero coordinate and the tensor has
            no continuous extension there.
    """
    value = -np.sum(as_upper(p) * pair_log_product(g, mt, xi), axis=-1)
    return float(value) if np.ndim(value) == 0 else value


def information_functional(xi: PointLike) -> Union[float, np.ndarray]:
    """I(xi) = sum_i 1/xi_i, which is at least d^2.

    Raises:
        ZeroCoordinateError: If some coordinate is 0.
    """
    coords = as_coords(xi)
    if np.any(coords <= 0):
        raise ZeroCoordinateError(
            f"The information functional needs strictly positive coordinates, got min {coords.min()!r}."
        )
    value = np.sum(1.0 / coords, axis=-1)
    return float(value) if np.ndim(value) == 0 else value
