"""Custom exceptions for the graph Hamilton-Jacobi solver.

This module defines specific exception types for the error conditions of the
solver library and the experiment harness. Two families decide the CLI exit
code: configuration problems (exit code 2) and numerical failures (exit code 3).
"""

from __future__ import annotations


class GraphHJEError(Exception):
    """Base exception for all solver errors."""


class ConfigurationError(GraphHJEError):
    """Raised when user-supplied parameters are invalid."""


class NumericalError(GraphHJEError):
    """Raised when a computation fails numerically."""


# ===== Graph validation =====


class GraphValidationError(ConfigurationError):
    """Raised when a weight matrix does not describe a valid graph."""


class AsymmetricWeightsError(GraphValidationError):
    """Raised when the weight matrix is not symmetric."""


class NegativeWeightError(GraphValidationError):
    """Raised when the weight matrix has a negative entry."""


class SelfLoopError(GraphValidationError):
    """Raised when the weight matrix has a nonzero diagonal entry."""


class DisconnectedError(GraphValidationError):
    """Raised when the edge set does not connect every vertex."""


class IndexOutOfRangeError(GraphValidationError):
    """Raised when a vertex label lies outside 1..d."""


# ===== Simplex and mesh =====


class SimplexError(ConfigurationError):
    """Raised when a point or tuple is outside the required simplex."""


class NotInSimplexEpsError(SimplexError):
    """Raised when a probability vector has a coordinate below epsilon."""


class NotNondecreasingError(SimplexError):
    """Raised when a cumulative tuple is not nondecreasing."""


class OutOfRangeError(SimplexError):
    """Raised when a cumulative tuple leaves [0, 1 - d*eps]."""


class MeshError(ConfigurationError):
    """Raised when mesh parameters are inconsistent."""


class NonIntegerLevelsError(MeshError):
    """Raised when (1 - d*eps)/h is not an integer."""


class BadMeshSizeError(MeshError):
    """Raised when h or eps is outside its admissible range."""


class NotInteriorError(MeshError):
    """Raised when an interior-only operation receives a boundary index."""


class NoDefinedNeighborError(MeshError):
    """Raised when no defined value exists to extrapolate from."""


# ===== Calculus and Hamiltonians =====


class CalculusError(ConfigurationError):
    """Raised when a calculus operation receives invalid arguments."""


class NegativeArgumentError(CalculusError):
    """Raised when a metric tensor is evaluated at a negative argument."""


class SingularLogAtBoundaryError(CalculusError):
    """Raised when log(xi) is needed at a zero coordinate without a continuous extension."""


class ZeroCoordinateError(CalculusError):
    """Raised when the information functional is evaluated at a zero coordinate."""


class BoundaryPointError(CalculusError):
    """Raised when a Hamiltonian is evaluated outside the open simplex."""


# ===== Schemes =====


class SchemeConfigError(ConfigurationError):
    """Raised when time-stepping parameters are inconsistent."""


class CflViolationError(NumericalError):
    """Raised in strict mode when tau/h exceeds the estimated CFL bound."""


class NonFiniteValueError(NumericalError):
    """Raised when a grid function blows up or becomes non-finite."""


# ===== Experiments =====


class UnknownConfigKeyError(ConfigurationError):
    """Raised when an experiment file contains a key that is not recognised."""


class ConfigValueError(ConfigurationError):
    """Raised when an experiment file value cannot be parsed or is out of range."""


class NonNestedMeshesError(ConfigurationError):
    """Raised when coarse mesh nodes are not nodes of the reference mesh."""


class ConfigNotOracleCompatibleError(ConfigurationError):
    """Raised when an oracle comparison is requested outside the pure-noise regime."""
