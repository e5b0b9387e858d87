"""Boundary treatment for grid functions on the truncated simplex mesh.

Grid functions keep a slot for every mesh node. Before differencing, boundary
slots are recomputed from interior values by a fixed linear map (a
``BoundaryPlan``), so boundary values never carry state between steps.

* constant: copy the l2-nearest interior node, ties to the smallest rank.
* linear: 2 U(b + v) - U(b + 2v), averaged over every lattice direction v whose
  two points are interior; otherwise reflect through the nearest interior node,
  2 xi* - b; otherwise constant.
* dirichlet: prescribed values.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from graph_hje.exceptions import ConfigurationError, NoDefinedNeighborError
from graph_hje.simplex_mesh import Mesh, all_offsets

logger = logging.getLogger(__name__)

_TIE_TOLERANCE = 1e-12


class BoundaryMode(enum.Enum):
    CONSTANT = "constant"
    LINEAR = "linear"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class BoundaryCondition:
    """How boundary slots get their values.

    Attributes:
        mode: CONSTANT, LINEAR or DIRICHLET.
        value: For DIRICHLET, a function of an (n, d) array of points.
    """

    mode: BoundaryMode = BoundaryMode.LINEAR
    value: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self) -> None:
        if self.mode is BoundaryMode.DIRICHLET and self.value is None:
            raise ConfigurationError("A Dirichlet boundary condition needs a value function.")

    @classmethod
    def constant(cls) -> BoundaryCondition:
        return cls(BoundaryMode.CONSTANT)

    @classmethod
    def linear(cls) -> BoundaryCondition:
        return cls(BoundaryMode.LINEAR)

    @classmethod
    def dirichlet(cls, value: Union[float, Callable[[np.ndarray], np.ndarray]]) -> BoundaryCondition:
        if callable(value):
            return cls(BoundaryMode.DIRICHLET, value)
        return cls(BoundaryMode.DIRICHLET, _ConstantValue(float(value)))

    @property
    def is_extrapolation(self) -> bool:
        return self.mode is not BoundaryMode.DIRICHLET


@dataclass(frozen=True)
class _ConstantValue:
    value: float

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        return np.full(np.shape(xi)[:-1], self.value)


@dataclass(frozen=True, eq=False)
class BoundaryPlan:
    """boundary values = extrapolation @ interior values + fixed.

    Attributes:
        mesh: The mesh.
        condition: The boundary condition the plan implements.
        extrapolation: Sparse (n_boundary, n_interior) map, rows and columns in
            increasing rank order.
        fixed: Dirichlet values per boundary node (zeros for extrapolation).
    """

    mesh: Mesh
    condition: BoundaryCondition
    extrapolation: csr_matrix = field(repr=False)
    fixed: np.ndarray = field(repr=False)

    def fill(self, values: np.ndarray) -> np.ndarray:
        """Return a copy of ``values`` with every boundary slot recomputed."""
        out = np.array(values, dtype=float)
        out[self.mesh.boundary_ranks] = self.extrapolation @ out[self.mesh.interior_ranks] + self.fixed
        return out

    @property
    def is_monotone(self) -> bool:
        """Whether every extrapolation weight is nonnegative."""
        return bool(np.all(self.extrapolation.data >= 0))


def nearest_interior(mesh: Mesh, points: np.ndarray) -> np.ndarray:
    """Rank of the l2-nearest interior node to each point, ties to the smallest rank.

    Raises:
        NoDefinedNeighborError: If the mesh has no interior node.
    """
    interior = mesh.interior_ranks
    if interior.size == 0:
        raise NoDefinedNeighborError(
            f"Mesh with N={mesh.n_levels} and d={mesh.d} has no interior node to extrapolate from.\n"
            f"Refine the mesh (N >= d for a nonempty interior)."
        )
    points = np.atleast_2d(np.asarray(points, dtype=float))
    k = min(interior.size, 2 * len(all_offsets(mesh.d)) + 1)
    distances, positions = mesh.interior_tree.query(points, k=k)
    distances = distances.reshape(points.shape[0], k)
    positions = positions.reshape(points.shape[0], k)
    ties = distances <= distances[:, :1] + _TIE_TOLERANCE
    best = np.where(ties, positions, np.iinfo(np.int64).max).min(axis=1)
    return interior[best]


@lru_cache(maxsize=32)
def boundary_plan(mesh: Mesh, condition: BoundaryCondition) -> BoundaryPlan:
    """Build (and cache per mesh) the fill map for a boundary condition."""
    n_boundary = mesh.boundary_ranks.size
    n_interior = mesh.interior_ranks.size
    if condition.mode is BoundaryMode.DIRICHLET:
        fixed = np.asarray(condition.value(mesh.nodes[mesh.boundary_ranks]), dtype=float)
        fixed = np.broadcast_to(fixed, (n_boundary,)).copy()
        extrapolation = csr_matrix((n_boundary, n_interior))
    else:
        fixed = np.zeros(n_boundary)
        rows, cols, weights = _extrapolation_entries(mesh, condition.mode)
        position = np.full(mesh.size, -1, dtype=np.int64)
        position[mesh.interior_ranks] = np.arange(n_interior)
        extrapolation = coo_matrix(
            (weights, (rows, position[cols])), shape=(n_boundary, n_interior)
        ).tocsr()
    fixed.setflags(write=False)
    logger.debug(
        f"Boundary plan ({condition.mode.value}) for N={mesh.n_levels}: "
        f"{n_boundary} boundary nodes from {n_interior} interior nodes"
    )
    return BoundaryPlan(mesh=mesh, condition=condition, extrapolation=extrapolation, fixed=fixed)


def _extrapolation_entries(mesh: Mesh, mode: BoundaryMode) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    boundary = mesh.boundary_ranks
    nearest = nearest_interior(mesh, mesh.nodes[boundary])
    rows = np.arange(boundary.size)
    if mode is BoundaryMode.CONSTANT:
        return rows, nearest, np.ones(boundary.size)

    indices = mesh.indices[boundary]
    steps = np.stack([off.as_index_offset for off in all_offsets(mesh.d)])
    steps = np.concatenate([steps, -steps])
    first = mesh.ranks(indices[:, None, :] + steps[None, :, :])
    second = mesh.ranks(indices[:, None, :] + 2 * steps[None, :, :])
    usable = _is_interior(mesh, first) & _is_interior(mesh, second)
    counts = usable.sum(axis=1)

    row_list, col_list, weight_list = [], [], []
    along = counts > 0
    hit_rows, hit_dirs = np.nonzero(usable)
    share = 1.0 / counts[hit_rows]
    row_list += [hit_rows, hit_rows]
    col_list += [first[hit_rows, hit_dirs], second[hit_rows, hit_dirs]]
    weight_list += [2.0 * share, -share]

    stuck = np.flatnonzero(~along)
    if stuck.size:
        anchor = nearest[stuck]
        reflected = mesh.ranks(2 * mesh.indices[anchor] - indices[stuck])
        mirrored = _is_interior(mesh, reflected)
        row_list += [stuck[mirrored], stuck[mirrored], stuck[~mirrored]]
        col_list += [anchor[mirrored], reflected[mirrored], anchor[~mirrored]]
        weight_list += [
            np.full(int(mirrored.sum()), 2.0),
            np.full(int(mirrored.sum()), -1.0),
            np.ones(int((~mirrored).sum())),
        ]
        logger.debug(f"{stuck.size} boundary nodes have no interior lattice line; reflecting instead")
    return np.concatenate(row_list), np.concatenate(col_list), np.concatenate(weight_list)


def _is_interior(mesh: Mesh, ranks: np.ndarray) -> np.ndarray:
    safe = np.where(ranks >= 0, ranks, 0)
    return (ranks >= 0) & ~mesh.boundary_mask[safe]
