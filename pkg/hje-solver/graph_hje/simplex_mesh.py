"""The coordinate transform between the probability simplex and nondecreasing tuples.

For xi in P_eps(G) the transform Pi maps xi to its shifted cumulative sums

    Pi(xi) = (xi_1 - eps, xi_1 + xi_2 - 2 eps, ..., sum_{i<d} xi_i - (d-1) eps),

a nondecreasing (d-1)-tuple in [0, 1 - d eps]. The uniform mesh takes every
coordinate of that tuple on the lattice h * {0, ..., N}, N = (1 - d eps)/h.

Node coordinates are always rebuilt from integer indices, never accumulated, so
two meshes that share a node agree on its coordinates bit for bit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.spatial import cKDTree

from graph_hje.config import (
    LEVEL_INTEGRALITY_TOLERANCE,
    SIMPLEX_MEMBERSHIP_TOLERANCE,
    SIMPLEX_SUM_TOLERANCE,
)
from graph_hje.exceptions import (
    BadMeshSizeError,
    NonIntegerLevelsError,
    NotInSimplexEpsError,
    NotNondecreasingError,
    OutOfRangeError,
    SimplexError,
)
from graph_hje.graph import Graph
from graph_hje.utils.ranking import enumerate_tuples, is_admissible, rank_tuples, tuple_count
from graph_hje.utils.skew import pair_count, upper_pairs

logger = logging.getLogger(__name__)

MeshIndex = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SimplexPoint:
    """A probability vector over the vertices of a graph."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=float).reshape(-1)
        if coords.size < 2 or not np.all(np.isfinite(coords)):
            raise SimplexError(f"A simplex point needs at least 2 finite coordinates, got {coords}.")
        if np.any(coords < -SIMPLEX_MEMBERSHIP_TOLERANCE):
            raise SimplexError(f"Simplex coordinates must be nonnegative, got {coords}.")
        if abs(coords.sum() - 1.0) > SIMPLEX_SUM_TOLERANCE:
            raise SimplexError(f"Simplex coordinates must sum to 1, got sum {coords.sum()!r}.")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def d(self) -> int:
        return int(self.coords.size)

    def in_eps(self, eps: float) -> bool:
        """Membership in P_eps(G): every coordinate at least eps."""
        return bool(np.all(self.coords >= eps - SIMPLEX_MEMBERSHIP_TOLERANCE))

    def is_interior(self) -> bool:
        return bool(np.all(self.coords > 0))

    @classmethod
    def uniform(cls, d: int) -> SimplexPoint:
        return cls(np.full(d, 1.0 / d))


PointLike = Union[SimplexPoint, ArrayLike]


def as_coords(xi: PointLike) -> np.ndarray:
    """Coordinates of a SimplexPoint or of a raw array (batches allowed)."""
    if isinstance(xi, SimplexPoint):
        return xi.coords
    return np.asarray(xi, dtype=float)


@dataclass(frozen=True)
class OffsetVector:
    """The lattice direction of the simplex direction e_{j,k}, 1 <= j < k <= d.

    Moving xi by h * e_{j,k} (+1 at vertex j, -1 at vertex k) is the same as
    moving Pi(xi) by h * m_{j,k}, where m_{j,k} has ones in slots j..k-1.
    """

    j: int
    k: int
    d: int

    def __post_init__(self) -> None:
        if not 1 <= self.j < self.k <= self.d:
            raise ValueError(f"Offset pair ({self.j}, {self.k}) must satisfy 1 <= j < k <= {self.d}.")

    @property
    def as_index_offset(self) -> np.ndarray:
        offset = np.zeros(self.d - 1, dtype=np.int64)
        offset[self.j - 1 : self.k - 1] = 1
        return offset

    @property
    def as_simplex_offset(self) -> np.ndarray:
        offset = np.zeros(self.d)
        offset[self.j - 1] = 1.0
        offset[self.k - 1] = -1.0
        return offset


def all_offsets(d: int) -> tuple[OffsetVector, ...]:
    """Offsets for every pair in upper-triangle order."""
    rows, cols = upper_pairs(d)
    return tuple(OffsetVector(int(j) + 1, int(k) + 1, d) for j, k in zip(rows, cols))


@dataclass(frozen=True)
class BoundaryExit:
    """A stencil lookup that leaves the set of interior mesh nodes.

    Attributes:
        origin: The index the lookup started from.
        offset: The lattice direction of the lookup.
        direction: +1 for a forward lookup, -1 for a backward lookup.
        target: origin + direction * m_{j,k}; may be inadmissible.
        point: Pi^{-1} of the target, which may have coordinates below eps.
        admissible: Whether the target is a mesh index (then it is a boundary node).
    """

    origin: MeshIndex
    offset: OffsetVector
    direction: int
    target: MeshIndex
    point: np.ndarray = field(compare=False, repr=False)
    admissible: bool


@dataclass(frozen=True)
class StencilTable:
    """Ranks of the forward and backward neighbours of each interior node.

    Row r lists the neighbours of the r-th interior node, one column per pair.
    From an interior node every neighbour is a mesh node (interior or boundary).
    """

    plus: np.ndarray
    minus: np.ndarray


def pi_forward(xi: PointLike, eps: float) -> np.ndarray:
    """Pi(xi): shifted cumulative sums of the first d-1 coordinates.

    Raises:
        NotInSimplexEpsError: If some coordinate is below eps.
    """
    point = xi if isinstance(xi, SimplexPoint) else SimplexPoint(np.asarray(xi, dtype=float))
    coords = point.coords
    if np.any(coords < eps - SIMPLEX_MEMBERSHIP_TOLERANCE):
        raise NotInSimplexEpsError(
            f"Point {coords} is not in P_eps for eps={eps}: minimum coordinate {coords.min()!r}."
        )
    d = coords.size
    return np.cumsum(coords[:-1]) - eps * np.arange(1, d)


def pi_inverse(s: Sequence[float], eps: float) -> SimplexPoint:
    """Pi^{-1}(s) = (s1 + eps, s2 - s1 + eps, ..., 1 - s_{d-1} - (d-1) eps).

    Raises:
        NotNondecreasingError: If s decreases somewhere.
        OutOfRangeError: If s leaves [0, 1 - d*eps].
    """
    s = np.asarray(s, dtype=float).reshape(-1)
    d = s.size + 1
    tol = SIMPLEX_MEMBERSHIP_TOLERANCE
    if s.size > 1 and np.any(np.diff(s) < -tol):
        raise NotNondecreasingError(f"Cumulative tuple must be nondecreasing, got {s}.")
    if s[0] < -tol or s[-1] > 1 - d * eps + tol:
        raise OutOfRangeError(f"Cumulative tuple {s} must lie in [0, {1 - d * eps}].")
    padded = np.concatenate(([0.0], s, [1.0 - d * eps]))
    coords = np.diff(padded) + eps
    coords[-1] = 1.0 - s[-1] - (d - 1) * eps
    return SimplexPoint(coords)


def nodes_from_indices(indices: np.ndarray, n_levels: int, h: float, eps: float) -> np.ndarray:
    """Simplex coordinates of integer mesh indices (boundary padding 0 and N)."""
    indices = np.asarray(indices, dtype=np.int64)
    lead = np.zeros(indices.shape[:-1] + (1,), dtype=np.int64)
    tail = np.full(indices.shape[:-1] + (1,), n_levels, dtype=np.int64)
    gaps = np.diff(np.concatenate([lead, indices, tail], axis=-1), axis=-1)
    return gaps * h + eps


@dataclass(frozen=True, eq=False)
class Mesh:
    """The uniform mesh on P_eps(G) in cumulative-sum coordinates.

    Attributes:
        graph: The underlying graph.
        h: Mesh size.
        eps: Truncation level of the simplex.
        n_levels: N = (1 - d*eps)/h.
        indices: Every admissible index; row r is the index of rank r.
        nodes: Simplex coordinates of every index, same row order.
        boundary_mask: True where the node has a coordinate equal to eps.
    """

    graph: Graph
    h: float
    eps: float
    n_levels: int
    indices: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    boundary_mask: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.graph.d

    @property
    def size(self) -> int:
        return int(self.indices.shape[0])

    @cached_property
    def interior_ranks(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary_mask)

    @cached_property
    def boundary_ranks(self) -> np.ndarray:
        return np.flatnonzero(self.boundary_mask)

    @property
    def interior(self) -> frozenset[MeshIndex]:
        return frozenset(tuple(int(v) for v in row) for row in self.indices[self.interior_ranks])

    @property
    def boundary(self) -> frozenset[MeshIndex]:
        return frozenset(tuple(int(v) for v in row) for row in self.indices[self.boundary_ranks])

    def rank(self, index: Sequence[int]) -> int:
        """Dense rank of an admissible index.

        Raises:
            OutOfRangeError: If the index is not admissible.
        """
        value = int(rank_tuples(np.asarray([index], dtype=np.int64), self.n_levels)[0])
        if value < 0:
            raise OutOfRangeError(f"Index {tuple(index)} is not an admissible mesh index.")
        return value

    def index(self, rank: int) -> MeshIndex:
        return tuple(int(v) for v in self.indices[rank])

    def ranks(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized ranks; inadmissible rows give -1."""
        return rank_tuples(indices, self.n_levels)

    def is_admissible(self, index: Sequence[int]) -> bool:
        return bool(is_admissible(np.asarray(index), self.n_levels))

    @cached_property
    def stencil(self) -> StencilTable:
        """Neighbour ranks of every interior node along every pair direction."""
        interior = self.indices[self.interior_ranks]
        offsets = np.stack([off.as_index_offset for off in all_offsets(self.d)])
        plus = self.ranks(interior[:, None, :] + offsets[None, :, :])
        minus = self.ranks(interior[:, None, :] - offsets[None, :, :])
        if np.any(plus < 0) or np.any(minus < 0):
            raise AssertionError("An interior stencil left the admissible index set.")
        plus.setflags(write=False)
        minus.setflags(write=False)
        return StencilTable(plus=plus, minus=minus)

    @cached_property
    def interior_tree(self) -> cKDTree:
        """Nearest-neighbour search over interior node coordinates."""
        return cKDTree(self.nodes[self.interior_ranks])


def _levels_for(d: int, h: float, eps: float) -> int:
    if not 0 <= eps < 1.0 / d:
        raise BadMeshSizeError(f"eps must lie in [0, 1/{d}), got {eps}.")
    if not h > 0:
        raise BadMeshSizeError(f"Mesh size h must be positive, got {h}.")
    ratio = (1.0 - d * eps) / h
    levels = int(round(ratio))
    if abs(ratio - levels) > LEVEL_INTEGRALITY_TOLERANCE:
        raise NonIntegerLevelsError(
            f"(1 - d*eps)/h = {ratio!r} is not an integer for d={d}, eps={eps}, h={h}.\n"
            f"Choose h = (1 - d*eps)/N for an integer N, or configure n_levels instead of h."
        )
    if levels < 1:
        raise BadMeshSizeError(f"Mesh size h={h} is larger than 1 - d*eps = {1 - d * eps}.")
    return levels


def build_mesh(g: Graph, h: float, eps: float) -> Mesh:
    """Enumerate and classify every mesh index for mesh size h.

    Raises:
        NonIntegerLevelsError: If (1 - d*eps)/h is not an integer.
        BadMeshSizeError: If h or eps is out of range.
    """
    levels = _levels_for(g.d, h, eps)
    return _assemble(g, levels, float(h), float(eps))


def build_mesh_from_levels(g: Graph, n_levels: int, eps: float) -> Mesh:
    """Build the mesh with N = n_levels, so h = (1 - d*eps)/N exactly."""
    if int(n_levels) != n_levels or n_levels < 1:
        raise BadMeshSizeError(f"n_levels must be a positive integer, got {n_levels}.")
    if not 0 <= eps < 1.0 / g.d:
        raise BadMeshSizeError(f"eps must lie in [0, 1/{g.d}), got {eps}.")
    return _assemble(g, int(n_levels), (1.0 - g.d * eps) / int(n_levels), float(eps))


def _assemble(g: Graph, levels: int, h: float, eps: float) -> Mesh:
    indices = enumerate_tuples(levels, g.d - 1)
    nodes = nodes_from_indices(indices, levels, h, eps)
    lead = np.zeros((indices.shape[0], 1), dtype=np.int64)
    tail = np.full((indices.shape[0], 1), levels, dtype=np.int64)
    gaps = np.diff(np.concatenate([lead, indices, tail], axis=1), axis=1)
    boundary_mask = np.any(gaps == 0, axis=1)
    for array in (indices, nodes, boundary_mask):
        array.setflags(write=False)
    logger.debug(
        f"Built mesh d={g.d} N={levels} h={h} eps={eps}: {indices.shape[0]} nodes, "
        f"{int(boundary_mask.sum())} on the boundary"
    )
    return Mesh(
        graph=g,
        h=h,
        eps=eps,
        n_levels=levels,
        indices=indices,
        nodes=nodes,
        boundary_mask=boundary_mask,
    )


def shift_index(
    m: Mesh, i: Sequence[int], off: OffsetVector, direction: int
) -> Union[MeshIndex, BoundaryExit]:
    """Move an index by +/- m_{j,k}.

    Returns the shifted index when it is an interior node, and a BoundaryExit
    (carrying the possibly inadmissible target point) otherwise.
    """
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}.")
    origin = np.asarray(i, dtype=np.int64)
    target = origin + direction * off.as_index_offset
    admissible = m.is_admissible(target)
    if admissible and not m.boundary_mask[m.rank(target)]:
        return tuple(int(v) for v in target)
    return BoundaryExit(
        origin=tuple(int(v) for v in origin),
        offset=off,
        direction=direction,
        target=tuple(int(v) for v in target),
        point=nodes_from_indices(target, m.n_levels, m.h, m.eps),
        admissible=admissible,
    )


def barycentric_xy(nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Planar coordinates of points of the 2-simplex (d = 3) for plotting."""
    nodes = np.asarray(nodes, dtype=float)
    return nodes[..., 1] + 0.5 * nodes[..., 2], (np.sqrt(3.0) / 2.0) * nodes[..., 2]


def mesh_point_count(d: int, n_levels: int) -> int:
    return tuple_count(n_levels, d - 1)


__all__ = [
    "BoundaryExit",
    "Mesh",
    "MeshIndex",
    "OffsetVector",
    "SimplexPoint",
    "StencilTable",
    "all_offsets",
    "as_coords",
    "barycentric_xy",
    "build_mesh",
    "build_mesh_from_levels",
    "mesh_point_count",
    "nodes_from_indices",
    "pair_count",
    "pi_forward",
    "pi_inverse",
    "shift_index",
]
