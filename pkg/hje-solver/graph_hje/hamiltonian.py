"""Hamiltonians, potentials and the monotone discrete Hamiltonians of the schemes.

A discrete Hamiltonian G(xi, P, Q) takes a forward difference matrix P and a
backward difference matrix Q. Both builtin kinds are consistent,
G(xi, P, P) = H(xi, P) - lambda_1 * O_xi(P), nonincreasing in every p_{j,k} and
nondecreasing in every q_{j,k} (the Lax-Friedrichs kind under its dissipation
bound).

Everything that depends on xi alone is evaluated once per node set by
``DiscreteHamiltonian.at_nodes``; the resulting ``NodeHamiltonian`` is what the
time steppers call on every sweep.
"""

from __future__ import annotations

import abc
import enum
import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike

from graph_hje.calculus import (
    FieldLike,
    MetricTensor,
    as_upper,
    information_functional,
    pair_log_product,
    pair_metric,
)
from graph_hje.config import FINITE_DIFFERENCE_STEP, LF_GAMMA_SAMPLE_MOMENTA
from graph_hje.exceptions import BoundaryPointError, CalculusError, SchemeConfigError
from graph_hje.graph import Graph
from graph_hje.simplex_mesh import PointLike, as_coords
from graph_hje.utils.skew import pair_count, upper_pairs

logger = logging.getLogger(__name__)

_GAMMA_CHUNK = 2048


# ===== Coefficients =====


class CoefficientFn(abc.ABC):
    """The coefficient a(xi) in front of ||p||_xi^kappa."""

    name: str

    @abc.abstractmethod
    def __call__(self, xi: np.ndarray) -> np.ndarray:
        """Evaluate at strictly positive points, shape (..., d) -> (...)."""


@dataclass(frozen=True)
class InverseInformationPower(CoefficientFn):
    """a(xi) = I(xi)^(-power), I(xi) = sum_i 1/xi_i."""

    power: float = 2.0
    name = "inverse_information"

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        return np.asarray(information_functional(xi), dtype=float) ** (-self.power)


@dataclass(frozen=True)
class InverseThetaPower(CoefficientFn):
    """a(xi) = (sum_i xi_i^(-theta))^(-2)."""

    theta: float = 0.5
    name = "inverse_theta"

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        return np.sum(np.asarray(xi, dtype=float) ** (-self.theta), axis=-1) ** (-2.0)


@dataclass(frozen=True)
class LogPower(CoefficientFn):
    """a(xi) = (sum_i log xi_i)^(-2)."""

    name = "log_power"

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        return np.sum(np.log(np.asarray(xi, dtype=float)), axis=-1) ** (-2.0)


COEFFICIENT_NAMES = ("inverse_information", "inverse_theta", "log_power")


def coefficient_by_name(name: str, *, kappa: float = 2.0, theta: float = 0.5) -> CoefficientFn:
    if name == "inverse_information":
        return InverseInformationPower(kappa)
    if name == "inverse_theta":
        return InverseThetaPower(theta)
    if name == "log_power":
        return LogPower()
    raise CalculusError(
        f"Unknown coefficient {name!r}. Known coefficients: {', '.join(COEFFICIENT_NAMES)}."
    )


# ===== Potentials =====


class Potential(abc.ABC):
    """The potential F(xi) of the equation."""

    name: str

    @abc.abstractmethod
    def __call__(self, xi: np.ndarray) -> np.ndarray:
        ...


@dataclass(frozen=True)
class ZeroPotential(Potential):
    name = "zero"

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(xi)[:-1])


@dataclass(frozen=True)
class ConstantPotential(Potential):
    value: float = 0.0
    name = "constant"

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        return np.full(np.shape(xi)[:-1], float(self.value))


POTENTIAL_NAMES = ("zero", "constant")


def potential_by_name(name: str, *, value: float = 0.0) -> Potential:
    if name == "zero":
        return ZeroPotential()
    if name == "constant":
        return ConstantPotential(value)
    raise CalculusError(f"Unknown potential {name!r}. Known potentials: {', '.join(POTENTIAL_NAMES)}.")


# ===== Continuous Hamiltonians =====


class HamiltonianKind(enum.Enum):
    POWER_NORM = "power_norm"
    ZERO = "zero"


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """H(xi, p) = a(xi) * ||p||_xi^kappa, or identically zero.

    Attributes:
        graph: The graph whose edges carry the norm.
        tensor: The metric tensor of the norm.
        kind: POWER_NORM or ZERO.
        kappa: Homogeneity degree, > 1.
        coefficient: a(xi).
    """

    graph: Graph
    tensor: MetricTensor
    kind: HamiltonianKind = HamiltonianKind.POWER_NORM
    kappa: float = 2.0
    coefficient: CoefficientFn = field(default_factory=InverseInformationPower)

    def __post_init__(self) -> None:
        if not self.kappa > 1:
            raise CalculusError(f"kappa must be > 1, got {self.kappa}.")

    @classmethod
    def zero(cls, graph: Graph, tensor: MetricTensor) -> Hamiltonian:
        return cls(graph, tensor, kind=HamiltonianKind.ZERO)

    def coefficient_at(self, xi: np.ndarray) -> np.ndarray:
        if self.kind is HamiltonianKind.ZERO:
            return np.zeros(np.shape(xi)[:-1])
        return np.asarray(self.coefficient(xi), dtype=float)

    def momentum_gradient(self, xi: PointLike, p: FieldLike) -> np.ndarray:
        """Closed-form dH/dp_{j,k} for every pair. Shape (..., m)."""
        coords = _require_interior(as_coords(xi))
        weights = pair_metric(self.graph, self.tensor, coords)
        return _power_norm_gradient(self.coefficient_at(coords), weights, as_upper(p), self.kappa)


def _require_interior(coords: np.ndarray) -> np.ndarray:
    if np.any(coords <= 0):
        raise BoundaryPointError(
            f"Hamiltonians are evaluated on the open simplex only; got a coordinate {coords.min()!r}."
        )
    return coords


def _power_norm(a: np.ndarray, weights: np.ndarray, p: np.ndarray, kappa: float) -> np.ndarray:
    return a * np.sum(weights * p**2, axis=-1) ** (0.5 * kappa)


def _power_norm_gradient(a: np.ndarray, weights: np.ndarray, p: np.ndarray, kappa: float) -> np.ndarray:
    squared = np.sum(weights * p**2, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(squared > 0, kappa * a * squared ** (0.5 * kappa - 1.0), 0.0)
    return scale[..., None] * weights * p


def ham_eval(H: Hamiltonian, xi: PointLike, p: FieldLike) -> Union[float, np.ndarray]:
    """H(xi, p) = a(xi) * ||p||_xi^kappa (0 for the zero Hamiltonian).

    Raises:
        BoundaryPointError: If xi has a zero coordinate.
    """
    coords = _require_interior(as_coords(xi))
    weights = pair_metric(H.graph, H.tensor, coords)
    value = _power_norm(H.coefficient_at(coords), weights, as_upper(p), H.kappa)
    return float(value) if np.ndim(value) == 0 else value


# ===== Discrete Hamiltonians =====


class DiscreteKind(enum.Enum):
    OSHER_SETHIAN = "osher_sethian"
    LAX_FRIEDRICHS = "lax_friedrichs"


@dataclass(frozen=True, eq=False)
class DiscreteHamiltonian:
    """G = G_H + lambda_1 * G_O.

    Attributes:
        kind: OSHER_SETHIAN or LAX_FRIEDRICHS.
        base: The continuous Hamiltonian.
        noise_intensity: lambda_1 >= 0.
        gamma: Per-pair Lax-Friedrichs dissipation, upper-triangle order; unset
            until ``lf_gamma_default`` or the configuration provides it.
    """

    kind: DiscreteKind
    base: Hamiltonian
    noise_intensity: float = 1.0
    gamma: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not self.noise_intensity >= 0:
            raise CalculusError(f"Noise intensity must be >= 0, got {self.noise_intensity}.")
        if self.gamma is not None:
            gamma = np.array(self.gamma, dtype=float).reshape(-1)
            if gamma.shape != (pair_count(self.graph.d),) or np.any(gamma < 0):
                raise CalculusError(
                    f"Lax-Friedrichs gamma must be {pair_count(self.graph.d)} nonnegative values, got {gamma}."
                )
            gamma = gamma * self.graph.pair_edge_mask
            gamma.setflags(write=False)
            object.__setattr__(self, "gamma", gamma)

    @property
    def graph(self) -> Graph:
        return self.base.graph

    @property
    def tensor(self) -> MetricTensor:
        return self.base.tensor

    def with_gamma(self, gamma: ArrayLike) -> DiscreteHamiltonian:
        return replace(self, gamma=np.asarray(gamma, dtype=float))

    def at_nodes(self, xi: PointLike) -> NodeHamiltonian:
        """Freeze every xi-dependent factor at a batch of points (n, d).

        Raises:
            BoundaryPointError: If a point has a zero coordinate.
            SchemeConfigError: If a Lax-Friedrichs Hamiltonian has no gamma yet.
        """
        coords = _require_interior(np.atleast_2d(as_coords(xi)))
        if self.kind is DiscreteKind.LAX_FRIEDRICHS and self.gamma is None:
            raise SchemeConfigError(
                "The Lax-Friedrichs Hamiltonian has no dissipation set.\n"
                "Configure lf_gamma, or derive it with lf_gamma_default(...) and with_gamma(...)."
            )
        rows, cols = upper_pairs(self.graph.d)
        return NodeHamiltonian(
            kind=self.kind,
            kappa=self.base.kappa,
            coefficient=self.base.coefficient_at(coords),
            weights=pair_metric(self.graph, self.tensor, coords),
            noise=self.noise_intensity * pair_log_product(self.graph, self.tensor, coords),
            upwind_forward=coords[:, rows] <= coords[:, cols],
            gamma=self.gamma,
        )


@dataclass(frozen=True, eq=False)
class NodeHamiltonian:
    """A discrete Hamiltonian with its xi-dependent factors fixed at n nodes."""

    kind: DiscreteKind
    kappa: float
    coefficient: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    noise: np.ndarray = field(repr=False)
    upwind_forward: np.ndarray = field(repr=False)
    gamma: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return int(self.coefficient.shape[0])

    def transport(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        """lambda_1 * G_O: upwind forward differences where xi_j <= xi_k."""
        return np.sum(self.noise * np.where(self.upwind_forward, P, Q), axis=-1)

    def hamiltonian_part(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        if self.kind is DiscreteKind.OSHER_SETHIAN:
            clamped = np.minimum(P, 0.0) ** 2 + np.maximum(Q, 0.0) ** 2
            return self.coefficient * np.sum(self.weights * clamped, axis=-1) ** (0.5 * self.kappa)
        central = _power_norm(self.coefficient, self.weights, 0.5 * (P + Q), self.kappa)
        return central - np.sum(self.gamma * (P - Q), axis=-1)

    def __call__(self, P: ArrayLike, Q: ArrayLike) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        return self.hamiltonian_part(P, Q) + self.transport(P, Q)


def discrete_ham_eval(
    G: DiscreteHamiltonian, xi: PointLike, P: FieldLike, Q: FieldLike
) -> Union[float, np.ndarray]:
    """G(xi, P, Q) for a point (d,) or a batch of points (n, d).

    Raises:
        BoundaryPointError: If xi has a zero coordinate.
    """
    coords = as_coords(xi)
    value = G.at_nodes(coords)(as_upper(P), as_upper(Q))
    return float(value[0]) if coords.ndim == 1 else value


def lf_gamma_default(
    H: Hamiltonian,
    xi_sample: ArrayLike,
    R: float,
    *,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """gamma_{j,k} = 1/2 * max |dH/dp_{j,k}| over sampled xi and ||P||_inf <= R.

    The partial derivatives are central finite differences. Momentum samples are
    the axis points +-R, the corners of [-R, R]^m and random points of the cube.
    """
    if not R > 0:
        raise CalculusError(f"R must be positive, got {R}.")
    m = pair_count(H.graph.d)
    if H.kind is HamiltonianKind.ZERO:
        return np.zeros(m)
    rng = np.random.default_rng(0) if rng is None else rng
    coords = _require_interior(np.atleast_2d(np.asarray(xi_sample, dtype=float)))
    momenta = _momentum_samples(m, R, rng)[None, :, :]
    step = FINITE_DIFFERENCE_STEP * max(1.0, R)
    gamma = np.zeros(m)
    for start in range(0, coords.shape[0], _GAMMA_CHUNK):
        chunk = coords[start : start + _GAMMA_CHUNK]
        a = H.coefficient_at(chunk)[:, None]
        weights = pair_metric(H.graph, H.tensor, chunk)[:, None, :]
        for position in range(m):
            shift = np.zeros(m)
            shift[position] = step
            forward = _power_norm(a, weights, momenta + shift, H.kappa)
            backward = _power_norm(a, weights, momenta - shift, H.kappa)
            slope = np.max(np.abs(forward - backward)) / (2.0 * step)
            gamma[position] = max(gamma[position], 0.5 * slope)
    gamma *= H.graph.pair_edge_mask
    logger.debug(f"Lax-Friedrichs dissipation for R={R}: {gamma}")
    return gamma


def _momentum_samples(m: int, R: float, rng: np.random.Generator) -> np.ndarray:
    axes = np.concatenate([R * np.eye(m), -R * np.eye(m)])
    if m <= 10:
        corners = R * np.array(list(itertools.product((-1.0, 1.0), repeat=m)))
    else:
        corners = R * rng.choice((-1.0, 1.0), size=(2 * LF_GAMMA_SAMPLE_MOMENTA, m))
    interior = rng.uniform(-R, R, size=(LF_GAMMA_SAMPLE_MOMENTA, m))
    return np.concatenate([np.zeros((1, m)), axes, corners, interior])
