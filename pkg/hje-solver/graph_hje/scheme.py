"""Monotone finite-difference schemes for Hamilton-Jacobi equations on the simplex.

The explicit scheme advances every interior node by

    U^{n+1} = U^n - tau * F(xi) - tau * G(xi, D+U^n, D-U^n),

where entry (j, k) of D+/D- is sqrt(omega_{j,k})/h times the forward/backward
difference of U along the lattice direction of e_{j,k}. The implicit scheme
solves the same relation with D+/D- taken at U^{n+1}, by fixed-point iteration.

Updates always read a frozen copy of the previous iterate. Boundary slots are
refilled from interior values (or fixed Dirichlet values) before each
differencing, see ``graph_hje.boundary``.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np

from graph_hje.boundary import BoundaryCondition, BoundaryMode, BoundaryPlan, boundary_plan, nearest_interior
from graph_hje.calculus import SkewField
from graph_hje.config import (
    BLOWUP_FACTOR,
    CFL_SAMPLE_MOMENTA,
    CFL_SAMPLE_POINTS,
    DEFAULT_IMPLICIT_MAX_ITERS,
    DEFAULT_IMPLICIT_TOL,
    FINITE_DIFFERENCE_STEP,
    LOCAL_SOLVE_BISECTIONS,
    STEP_INTEGRALITY_TOLERANCE,
    UNIFORM_BOUND_SLACK,
)
from graph_hje.exceptions import (
    CflViolationError,
    NonFiniteValueError,
    NotInteriorError,
    SchemeConfigError,
)
from graph_hje.hamiltonian import (
    DiscreteHamiltonian,
    DiscreteKind,
    NodeHamiltonian,
    Potential,
    lf_gamma_default,
)
from graph_hje.simplex_mesh import BoundaryExit, Mesh, MeshIndex, build_mesh, nodes_from_indices
from graph_hje.utils.skew import pair_count

logger = logging.getLogger(__name__)

InitialData = Callable[[np.ndarray], np.ndarray]


class SchemeKind(enum.Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


@dataclass(frozen=True)
class SchemeConfig:
    """Time stepping parameters.

    Attributes:
        h: Mesh size.
        tau: Time step.
        eps: Truncation level of the simplex.
        T: Final time; T/tau must be an integer.
        boundary: How boundary slots are filled.
        scheme: EXPLICIT or IMPLICIT.
        max_iters: Implicit sweep limit per step.
        tol: Implicit stopping tolerance on the sup-norm change.
        implicit_fallback: Switch a diverging fixed-point iteration to
            nonlinear Jacobi sweeps.
        cfl_ratio_check: Explicit runs with tau/h above this bound are rejected.
        strict_cfl: Reject explicit runs that fail the estimated CFL bound.
        gradient_radius: The radius R of the difference bound; derived from the
            initial data when unset.
    """

    h: float
    tau: float
    eps: float
    T: float
    boundary: BoundaryCondition = field(default_factory=BoundaryCondition.linear)
    scheme: SchemeKind = SchemeKind.EXPLICIT
    max_iters: int = DEFAULT_IMPLICIT_MAX_ITERS
    tol: float = DEFAULT_IMPLICIT_TOL
    implicit_fallback: bool = True
    cfl_ratio_check: Optional[float] = None
    strict_cfl: bool = False
    gradient_radius: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.h > 0 or not self.tau > 0:
            raise SchemeConfigError(f"h and tau must be positive, got h={self.h}, tau={self.tau}.")
        if not self.eps >= 0:
            raise SchemeConfigError(f"eps must be >= 0, got {self.eps}.")
        if not self.T >= 0:
            raise SchemeConfigError(f"T must be >= 0, got {self.T}.")
        if self.max_iters < 1 or not self.tol > 0:
            raise SchemeConfigError(
                f"Implicit solver needs max_iters >= 1 and tol > 0, got {self.max_iters}, {self.tol}."
            )
        _step_count(self.T, self.tau)

    @classmethod
    def from_ratio(cls, h: float, ratio: float, T: float, **kwargs) -> SchemeConfig:
        """tau = T / ceil(T / (ratio*h)), the largest step <= ratio*h that divides T."""
        if not ratio > 0:
            raise SchemeConfigError(f"tau/h ratio must be positive, got {ratio}.")
        target = ratio * h
        if T == 0:
            return cls(h=h, tau=target, T=0.0, **kwargs)
        quotient = T / target
        steps = round(quotient) if abs(quotient - round(quotient)) <= STEP_INTEGRALITY_TOLERANCE else math.ceil(quotient)
        return cls(h=h, tau=T / max(steps, 1), T=T, **kwargs)

    @property
    def ratio(self) -> float:
        return self.tau / self.h

    @property
    def n_steps(self) -> int:
        return _step_count(self.T, self.tau)

    def step_of(self, t: float) -> int:
        """Index n with t = n * tau.

        Raises:
            SchemeConfigError: If t is not on the time grid or outside [0, T].
        """
        quotient = t / self.tau
        step = int(round(quotient))
        if abs(quotient - step) > STEP_INTEGRALITY_TOLERANCE or not 0 <= step <= self.n_steps:
            raise SchemeConfigError(
                f"Snapshot time {t} is not a multiple of tau={self.tau} within [0, T={self.T}]."
            )
        return step


def _step_count(T: float, tau: float) -> int:
    quotient = T / tau
    steps = int(round(quotient))
    if abs(quotient - steps) > STEP_INTEGRALITY_TOLERANCE:
        raise SchemeConfigError(
            f"T/tau = {quotient!r} is not an integer (T={T}, tau={tau}).\n"
            f"Configure a ratio instead of tau to have tau derived from T."
        )
    return steps


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values at every mesh node, indexed by rank, boundary slots included."""

    mesh: Mesh
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size != self.mesh.size:
            raise SchemeConfigError(
                f"Grid function has {values.size} values for a mesh of {self.mesh.size} nodes."
            )
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise NonFiniteValueError(
                f"Grid function holds a non-finite value at mesh index {self.mesh.index(bad)}."
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, mesh: Mesh, fn: InitialData) -> GridFunction:
        """Evaluate a function of (n, d) point arrays at every mesh node."""
        return cls(mesh, np.broadcast_to(np.asarray(fn(mesh.nodes), dtype=float), (mesh.size,)))

    @property
    def interior_values(self) -> np.ndarray:
        return self.values[self.mesh.interior_ranks]

    def at(self, index: Sequence[int]) -> float:
        return float(self.values[self.mesh.rank(index)])

    def sup_norm(self, *, interior_only: bool = False) -> float:
        values = self.interior_values if interior_only else self.values
        return float(np.max(np.abs(values))) if values.size else 0.0


# ===== Differences and extrapolation =====


def _difference_arrays(mesh: Mesh, filled: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    stencil = mesh.stencil
    scale = mesh.graph.pair_sqrt_weights / mesh.h
    centre = filled[mesh.interior_ranks][:, None]
    return scale * (filled[stencil.plus] - centre), scale * (centre - filled[stencil.minus])


def difference_matrices(
    U: GridFunction, i: Sequence[int], bmode: BoundaryCondition
) -> tuple[SkewField, SkewField]:
    """D+ and D- of U at an interior index, after refilling boundary slots.

    Raises:
        NotInteriorError: If i is a boundary index.
    """
    mesh = U.mesh
    rank = mesh.rank(i)
    if mesh.boundary_mask[rank]:
        raise NotInteriorError(f"Difference matrices need an interior index, got {tuple(i)}.")
    filled = boundary_plan(mesh, bmode).fill(U.values)
    position = int(np.searchsorted(mesh.interior_ranks, rank))
    stencil = mesh.stencil
    scale = mesh.graph.pair_sqrt_weights / mesh.h
    plus = scale * (filled[stencil.plus[position]] - filled[rank])
    minus = scale * (filled[rank] - filled[stencil.minus[position]])
    return SkewField(mesh.d, plus), SkewField(mesh.d, minus)


def extrapolate(U: GridFunction, target: Union[BoundaryExit, MeshIndex], bmode: BoundaryCondition) -> float:
    """The value a stencil uses at a boundary target.

    Admissible targets take the value the boundary plan assigns. Targets one step
    outside the mesh reflect through the origin of the lookup (linear) or copy
    the nearest interior node (constant).
    """
    mesh = U.mesh
    if isinstance(target, BoundaryExit):
        point, admissible, index = target.point, target.admissible, target.target
    else:
        index = tuple(int(v) for v in target)
        admissible = mesh.is_admissible(index)
        point = nodes_from_indices(np.asarray(index), mesh.n_levels, mesh.h, mesh.eps)
    if bmode.mode is BoundaryMode.DIRICHLET:
        return float(np.asarray(bmode.value(np.atleast_2d(point)), dtype=float).reshape(-1)[0])

    filled = boundary_plan(mesh, bmode).fill(U.values)
    if admissible:
        return float(filled[mesh.rank(index)])
    if bmode.mode is BoundaryMode.LINEAR and isinstance(target, BoundaryExit):
        origin = np.asarray(target.origin)
        mirror = mesh.ranks((2 * origin - np.asarray(target.target))[None, :])[0]
        if mirror >= 0 and not mesh.boundary_mask[mirror]:
            return float(2.0 * filled[mesh.rank(origin)] - filled[mirror])
    return float(filled[nearest_interior(mesh, point)[0]])


# ===== Steppers =====


@dataclass(frozen=True, eq=False)
class SchemeOperator:
    """Everything a step needs, evaluated once per (mesh, Hamiltonian, potential, config)."""

    mesh: Mesh
    plan: BoundaryPlan
    hamiltonian: NodeHamiltonian
    forcing: np.ndarray = field(repr=False)
    tau: float

    def fill(self, values: np.ndarray) -> np.ndarray:
        return self.plan.fill(values)

    def explicit_update(self, values: np.ndarray) -> np.ndarray:
        filled = self.fill(values)
        P, Q = _difference_arrays(self.mesh, filled)
        update = filled[self.mesh.interior_ranks] - self.tau * (self.forcing + self.hamiltonian(P, Q))
        filled[self.mesh.interior_ranks] = update
        return self.fill(filled)

    def picard_sweep(self, iterate: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        P, Q = _difference_arrays(self.mesh, iterate)
        return rhs - self.tau * self.hamiltonian(P, Q)

    def residual(self, iterate: np.ndarray, rhs: np.ndarray) -> float:
        """Sup over interior nodes of |U - rhs + tau*G(D+U, D-U)| for a filled iterate."""
        if self.mesh.interior_ranks.size == 0:
            return 0.0
        return float(np.max(np.abs(iterate[self.mesh.interior_ranks] - self.picard_sweep(iterate, rhs))))

    def jacobi_sweep(self, iterate: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """Solve each node's scalar equation with its neighbours frozen.

        phi(x) = x - rhs + tau * G(P(x), Q(x)) is increasing with slope >= 1, so
        the root lies within |phi(x0)| of the current value x0.
        """
        stencil = self.mesh.stencil
        scale = self.mesh.graph.pair_sqrt_weights / self.mesh.h
        ahead = scale * iterate[stencil.plus]
        behind = scale * iterate[stencil.minus]

        def residual(x: np.ndarray) -> np.ndarray:
            column = scale * x[:, None]
            return x - rhs + self.tau * self.hamiltonian(ahead - column, column - behind)

        start = iterate[self.mesh.interior_ranks]
        spread = np.abs(residual(start))
        low, high = start - spread, start + spread
        for _ in range(LOCAL_SOLVE_BISECTIONS):
            middle = 0.5 * (low + high)
            below = residual(middle) < 0
            low = np.where(below, middle, low)
            high = np.where(below, high, middle)
        return 0.5 * (low + high)


@lru_cache(maxsize=8)
def scheme_operator(
    mesh: Mesh, G: DiscreteHamiltonian, F: Potential, cfg: SchemeConfig
) -> SchemeOperator:
    nodes = mesh.nodes[mesh.interior_ranks]
    return SchemeOperator(
        mesh=mesh,
        plan=boundary_plan(mesh, cfg.boundary),
        hamiltonian=G.at_nodes(nodes),
        forcing=np.asarray(F(nodes), dtype=float),
        tau=cfg.tau,
    )


def _check_ratio(cfg: SchemeConfig) -> None:
    if cfg.cfl_ratio_check is not None and cfg.ratio > cfg.cfl_ratio_check:
        raise CflViolationError(
            f"tau/h = {cfg.ratio:.6g} exceeds the configured bound {cfg.cfl_ratio_check:.6g} "
            f"for the explicit scheme."
        )


def explicit_step(
    U: GridFunction, G: DiscreteHamiltonian, F: Potential, cfg: SchemeConfig
) -> GridFunction:
    """One explicit step on every interior node, then a boundary refill.

    Raises:
        CflViolationError: If tau/h exceeds cfg.cfl_ratio_check.
        NonFiniteValueError: If the update is not finite.
    """
    _check_ratio(cfg)
    return GridFunction(U.mesh, scheme_operator(U.mesh, G, F, cfg).explicit_update(U.values))


@dataclass(frozen=True)
class ImplicitStep:
    """The outcome of one implicit step."""

    grid: GridFunction
    residual: float
    iterations: int
    used_fallback: bool = False

    def __iter__(self):
        return iter((self.grid, self.residual, self.iterations))


def implicit_step(
    U: GridFunction, G: DiscreteHamiltonian, F: Potential, cfg: SchemeConfig
) -> ImplicitStep:
    """Solve U' = U - tau*F - tau*G(xi, D+U', D-U') by fixed-point iteration from U.

    Stops when the sup-norm change drops to cfg.tol or after cfg.max_iters
    sweeps. When a sweep changes the iterate more than the sweep before it, the
    iteration restarts from U with a fresh budget of cfg.max_iters nonlinear
    Jacobi sweeps (if cfg.implicit_fallback). The returned residual is
    max |U' - U + tau*F + tau*G(xi, D+U', D-U')| over interior nodes of the
    returned grid, and iterations counts the sweeps that produced it.

    Raises:
        NonFiniteValueError: If the iteration produces non-finite values.
    """
    op = scheme_operator(U.mesh, G, F, cfg)
    interior = U.mesh.interior_ranks
    rhs = U.interior_values - cfg.tau * op.forcing
    start = op.fill(U.values)
    iterate = start.copy()
    previous_change = math.inf
    jacobi = False
    iterations = 0
    while iterations < cfg.max_iters:
        iterations += 1
        sweep = op.jacobi_sweep if jacobi else op.picard_sweep
        update = sweep(iterate, rhs)
        finite = bool(np.all(np.isfinite(update)))
        change = float(np.max(np.abs(update - iterate[interior]))) if finite and update.size else 0.0
        if not jacobi and cfg.implicit_fallback and (not finite or change > previous_change):
            logger.warning(
                f"Fixed-point iteration diverging at sweep {iterations} (change {change:.3e}); "
                f"restarting with nonlinear Jacobi sweeps"
            )
            jacobi = True
            iterate = start.copy()
            iterations = 0
            continue
        if not finite:
            raise NonFiniteValueError(f"Implicit iteration produced non-finite values at sweep {iterations}.")
        iterate[interior] = update
        iterate = op.fill(iterate)
        previous_change = change
        logger.debug(f"Implicit sweep {iterations}: change {change:.3e}")
        if change <= cfg.tol:
            break
    residual = op.residual(iterate, rhs)
    if residual > cfg.tol:
        logger.warning(
            f"Implicit step not converged after {iterations} {'Jacobi' if jacobi else 'fixed-point'} sweeps: "
            f"residual {residual:.3e} > tol {cfg.tol:.3e}"
        )
    return ImplicitStep(GridFunction(U.mesh, iterate), residual, iterations, jacobi)


# ===== Estimates =====


def gradient_bound(U: GridFunction) -> float:
    """R = 1 + max over interior nodes and pairs of |difference| / h."""
    mesh = U.mesh
    if mesh.interior_ranks.size == 0:
        return 1.0
    stencil = mesh.stencil
    centre = U.values[mesh.interior_ranks][:, None]
    spread = max(
        float(np.max(np.abs(U.values[stencil.plus] - centre))),
        float(np.max(np.abs(centre - U.values[stencil.minus]))),
    )
    return 1.0 + spread / mesh.h


@dataclass(frozen=True)
class CflReport:
    """Estimated CFL bound for the explicit scheme.

    Attributes:
        passed: Whether the configured ratio is within the bound.
        ratio: The configured tau/h.
        bound: 1 / (2 C (d^2 - d) ||sqrt(omega)||_inf), inf when C = 0.
        lipschitz: The estimated local Lipschitz constant C of G.
        radius: The ball radius d*R of the sampled arguments.
    """

    passed: bool
    ratio: float
    bound: float
    lipschitz: float
    radius: float


def simplex_samples(d: int, eps: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Random points of P_eps plus its vertices (when eps > 0)."""
    points = eps + (1.0 - d * eps) * rng.dirichlet(np.ones(d), size=count)
    if eps > 0:
        vertices = np.full((d, d), eps)
        np.fill_diagonal(vertices, 1.0 - (d - 1) * eps)
        points = np.concatenate([vertices, points])
    return points


def _ball_samples(m: int, radius: float, count: int, rng: np.random.Generator) -> np.ndarray:
    directions = rng.normal(size=(count, m))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True) * np.sqrt(2.0)
    return radius * rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / m) * directions


def estimate_lipschitz(
    G: DiscreteHamiltonian, points: np.ndarray, radius: float, rng: np.random.Generator
) -> float:
    """Sampled local Lipschitz constant of G in (P, Q) over Frobenius balls of the radius.

    Combines central-difference gradients (dual Frobenius norm) with difference
    quotients of random pairs.
    """
    m = pair_count(G.graph.d)
    node = G.at_nodes(np.repeat(points, CFL_SAMPLE_MOMENTA, axis=0))
    P = _ball_samples(m, radius, node.size, rng)
    Q = _ball_samples(m, radius, node.size, rng)
    step = FINITE_DIFFERENCE_STEP * max(1.0, radius)
    estimate = 0.0
    for argument in ("P", "Q"):
        gradient = np.zeros((node.size, m))
        for position in range(m):
            shift = np.zeros(m)
            shift[position] = step
            if argument == "P":
                gradient[:, position] = node(P + shift, Q) - node(P - shift, Q)
            else:
                gradient[:, position] = node(P, Q + shift) - node(P, Q - shift)
        gradient /= 2.0 * step
        estimate = max(estimate, float(np.max(np.linalg.norm(gradient, axis=1))) / np.sqrt(2.0))

    P2 = _ball_samples(m, radius, node.size, rng)
    Q2 = _ball_samples(m, radius, node.size, rng)
    distance = np.sqrt(2.0) * (np.linalg.norm(P - P2, axis=1) + np.linalg.norm(Q - Q2, axis=1))
    quotient = np.abs(node(P, Q) - node(P2, Q2)) / np.where(distance > 0, distance, np.inf)
    return max(estimate, float(np.max(quotient)))


def cfl_validate(
    G: DiscreteHamiltonian,
    cfg: SchemeConfig,
    R: float,
    *,
    rng: Optional[np.random.Generator] = None,
) -> CflReport:
    """Check tau/h <= 1 / (2 C_{dR} (d^2 - d) ||sqrt(omega)||_inf).

    C_{dR} is estimated over xi in P_eps and arguments with l2 norm <= d*R.
    Advisory: a failing check only raises when cfg.strict_cfl is set.

    Raises:
        CflViolationError: In strict mode, when the ratio exceeds the bound.
    """
    if not R > 0:
        raise SchemeConfigError(f"R must be positive, got {R}.")
    rng = np.random.default_rng(0) if rng is None else rng
    d = G.graph.d
    radius = d * R
    points = simplex_samples(d, cfg.eps, CFL_SAMPLE_POINTS, rng)
    lipschitz = estimate_lipschitz(G, points, radius, rng)
    denominator = 2.0 * lipschitz * (d * d - d) * G.graph.max_sqrt_weight
    bound = math.inf if denominator == 0 else 1.0 / denominator
    report = CflReport(
        passed=cfg.ratio <= bound, ratio=cfg.ratio, bound=bound, lipschitz=lipschitz, radius=radius
    )
    if not report.passed:
        message = (
            f"tau/h = {cfg.ratio:.6g} exceeds the estimated CFL bound {bound:.6g} "
            f"(Lipschitz estimate {lipschitz:.6g} on radius {radius:.6g})"
        )
        if cfg.strict_cfl:
            raise CflViolationError(message + ".")
        logger.warning(message)
    return report


def time_lipschitz_bound(
    G: DiscreteHamiltonian, F: Potential, mesh: Mesh, R: float
) -> float:
    """K = sup |G(xi, P, Q)| + ||F||_inf over interior nodes and |D+-| <= R sqrt(omega).

    The explicit scheme satisfies |U^{n+1} - U^n| <= K tau on the difference bound.
    """
    nodes = mesh.nodes[mesh.interior_ranks]
    if nodes.shape[0] == 0:
        return 0.0
    m = pair_count(mesh.d)
    node = G.at_nodes(nodes)
    reach = R * mesh.graph.pair_sqrt_weights
    if 2 * m <= 6:
        corners = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=2 * m)))
    else:
        corners = np.concatenate([np.zeros((1, 2 * m)), np.eye(2 * m), -np.eye(2 * m)])
    sup = 0.0
    for corner in corners:
        P = np.broadcast_to(reach * corner[:m], (node.size, m))
        Q = np.broadcast_to(reach * corner[m:], (node.size, m))
        sup = max(sup, float(np.max(np.abs(node(P, Q)))))
    return sup + float(np.max(np.abs(F(nodes))))


# ===== Runs =====


@dataclass(frozen=True)
class BoundViolation:
    step: int
    sup: float
    bound: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """The outcome of a run.

    Attributes:
        mesh: The mesh.
        times: Snapshot times.
        snapshots: Grid functions at the snapshot times.
        max_norms: sup over interior nodes of |U^n| for n = 0..N_T.
        bounds: ||U^0||_inf + t_n ||F||_inf + slack for n = 0..N_T.
        violations: Steps where max_norms exceeded bounds.
        residuals: Final residual of every implicit step.
        iterations: Sweep count of every implicit step.
        fallback_steps: Implicit steps that switched to Jacobi sweeps.
        time_derivative: max over n of ||U^{n+1} - U^n||_inf / tau on interior nodes.
        cfl: The CFL report of an explicit run.
        gamma: The Lax-Friedrichs dissipation used, if any.
        gradient_radius: R used by the CFL and dissipation estimates.
        elapsed_seconds: Wall-clock time of the stepping loop.
    """

    mesh: Mesh
    config: SchemeConfig
    times: tuple[float, ...]
    snapshots: tuple[GridFunction, ...]
    max_norms: np.ndarray = field(repr=False)
    bounds: np.ndarray = field(repr=False)
    violations: tuple[BoundViolation, ...] = ()
    residuals: tuple[float, ...] = ()
    iterations: tuple[int, ...] = ()
    fallback_steps: tuple[int, ...] = ()
    time_derivative: float = 0.0
    cfl: Optional[CflReport] = None
    gamma: Optional[tuple[float, ...]] = None
    gradient_radius: float = 1.0
    elapsed_seconds: float = 0.0

    @property
    def final(self) -> GridFunction:
        return self.snapshots[-1]

    @property
    def within_bound(self) -> bool:
        return not self.violations


def run(
    U0: InitialData,
    G: DiscreteHamiltonian,
    F: Potential,
    cfg: SchemeConfig,
    probes: Optional[Sequence[float]] = None,
    *,
    mesh: Optional[Mesh] = None,
    rng: Optional[np.random.Generator] = None,
) -> Trajectory:
    """Sample U0 at the mesh nodes and advance N_T = T/tau steps.

    The uniform bound sup|U^0| + t_n ||F||_inf is taken over all nodes of U^0 but
    checked against the sup over interior nodes only; boundary slots are
    extrapolated and never count as violations.

    Args:
        U0: Initial data, a function of (n, d) point arrays.
        G: The discrete Hamiltonian; a Lax-Friedrichs one without gamma gets the
            default dissipation for the run's gradient radius.
        F: The potential.
        cfg: Time stepping parameters.
        probes: Snapshot times (default: 0 and T).
        mesh: A prebuilt mesh for (G.graph, cfg.h, cfg.eps).
        rng: Random source of the dissipation and CFL estimates (default seed 0).

    Raises:
        NonFiniteValueError: On non-finite values or when sup|U^n| exceeds
            1e6 (||U^0||_inf + 1).
        CflViolationError: For explicit runs beyond the configured or (strict)
            estimated ratio.
    """
    mesh = build_mesh(G.graph, cfg.h, cfg.eps) if mesh is None else mesh
    initial = GridFunction.sample(mesh, U0)
    n_steps = cfg.n_steps
    probe_times = (0.0, cfg.T) if probes is None else tuple(float(t) for t in probes)
    probe_steps = {cfg.step_of(t): t for t in probe_times}

    radius = cfg.gradient_radius if cfg.gradient_radius is not None else gradient_bound(initial)
    gamma = None
    if G.kind is DiscreteKind.LAX_FRIEDRICHS:
        if G.gamma is None:
            G = G.with_gamma(
                lf_gamma_default(
                    G.base, mesh.nodes[mesh.interior_ranks], radius * G.graph.max_sqrt_weight, rng=rng
                )
            )
        gamma = tuple(float(v) for v in G.gamma)

    cfl = None
    if cfg.scheme is SchemeKind.EXPLICIT:
        _check_ratio(cfg)
        cfl = cfl_validate(G, cfg, radius, rng=rng)

    u0_sup = initial.sup_norm()
    forcing_sup = float(np.max(np.abs(F(mesh.nodes[mesh.interior_ranks])))) if mesh.interior_ranks.size else 0.0
    blowup = BLOWUP_FACTOR * (u0_sup + 1.0)
    bounds = u0_sup + cfg.tau * np.arange(n_steps + 1) * forcing_sup + UNIFORM_BOUND_SLACK
    max_norms = np.zeros(n_steps + 1)
    max_norms[0] = initial.sup_norm(interior_only=True)

    logger.info(
        f"Running {cfg.scheme.value} scheme: N={mesh.n_levels} ({mesh.size} nodes), h={cfg.h:.6g}, "
        f"tau={cfg.tau:.6g}, {n_steps} steps, boundary={cfg.boundary.mode.value}"
    )
    snapshots = {0: initial} if 0 in probe_steps else {}
    violations: list[BoundViolation] = []
    residuals: list[float] = []
    iterations: list[int] = []
    fallback_steps: list[int] = []
    time_derivative = 0.0
    current = initial
    started = time.perf_counter()
    for n in range(1, n_steps + 1):
        try:
            if cfg.scheme is SchemeKind.EXPLICIT:
                following = explicit_step(current, G, F, cfg)
            else:
                outcome = implicit_step(current, G, F, cfg)
                following = outcome.grid
                residuals.append(outcome.residual)
                iterations.append(outcome.iterations)
                if outcome.used_fallback:
                    fallback_steps.append(n)
        except NonFiniteValueError as e:
            raise NonFiniteValueError(f"Run blew up at step {n} (t={n * cfg.tau:.6g}): {e}") from e
        sup = following.sup_norm(interior_only=True)
        if sup > blowup:
            raise NonFiniteValueError(
                f"Run blew up at step {n} (t={n * cfg.tau:.6g}): sup|U| = {sup:.6g} exceeds "
                f"{blowup:.6g}.\nReduce tau/h or use the implicit scheme."
            )
        max_norms[n] = sup
        if sup > bounds[n]:
            if not violations:
                logger.warning(
                    f"Uniform bound violated at step {n}: sup|U| = {sup:.12g} > {bounds[n]:.12g}"
                )
            violations.append(BoundViolation(n, sup, float(bounds[n])))
        if current.mesh.interior_ranks.size:
            time_derivative = max(
                time_derivative,
                float(np.max(np.abs(following.interior_values - current.interior_values))) / cfg.tau,
            )
        if n in probe_steps:
            snapshots[n] = following
        current = following
        logger.debug(f"Step {n}/{n_steps}: sup|U| = {sup:.6g}")
    elapsed = time.perf_counter() - started

    if fallback_steps:
        logger.warning(f"{len(fallback_steps)} implicit steps needed the Jacobi fallback")
    logger.info(f"Finished {n_steps} steps in {elapsed:.2f}s; final sup|U| = {max_norms[-1]:.6g}")
    ordered = sorted(probe_steps)
    return Trajectory(
        mesh=mesh,
        config=cfg,
        times=tuple(probe_steps[n] for n in ordered),
        snapshots=tuple(snapshots[n] for n in ordered),
        max_norms=max_norms,
        bounds=bounds,
        violations=tuple(violations),
        residuals=tuple(residuals),
        iterations=tuple(iterations),
        fallback_steps=tuple(fallback_steps),
        time_derivative=time_derivative,
        cfl=cfl,
        gamma=gamma,
        gradient_radius=radius,
        elapsed_seconds=elapsed,
    )
