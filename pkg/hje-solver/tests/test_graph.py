"""Tests for graph validation and neighbourhoods."""

from __future__ import annotations

import networkx as nx
import numpy as np
import pytest

from graph_hje.exceptions import (
    AsymmetricWeightsError,
    DisconnectedError,
    GraphValidationError,
    IndexOutOfRangeError,
    NegativeWeightError,
    SelfLoopError,
)
from graph_hje.graph import complete_graph, neighbors, new_graph
from tests.hje_test_fixtures import PATH_WEIGHTS, path_graph, triangle


class TestNewGraph:
    """Tests for weight matrix validation."""

    def test_complete_triangle(self) -> None:
        """Test that unit off-diagonal weights give the complete triangle."""
        g = new_graph(3, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
        assert g.d == 3
        assert g.edges() == ((1, 2), (1, 3), (2, 3))

    def test_single_edge(self) -> None:
        """Test the smallest admissible graph."""
        g = new_graph(2, [[0, 1], [1, 0]])
        assert g.edges() == ((1, 2),)
        assert g.max_sqrt_weight == 1.0

    def test_flat_row_major_weights(self) -> None:
        """Test that a flat d*d sequence is read row-major."""
        g = new_graph(3, [0, 4, 0, 4, 0, 9, 0, 9, 0])
        assert g.weights[0, 1] == 4.0
        assert g.weights[1, 2] == 9.0
        np.testing.assert_allclose(g.pair_sqrt_weights, [2.0, 0.0, 3.0])
        assert g.pair_edge_mask.tolist() == [True, False, True]

    def test_weights_are_read_only(self) -> None:
        """Test that a validated graph cannot be mutated."""
        g = triangle()
        with pytest.raises(ValueError):
            g.weights[0, 1] = 2.0

    def test_isolated_vertex_is_disconnected(self) -> None:
        """Test that an isolated vertex is rejected."""
        weights = np.zeros((3, 3))
        weights[0, 1] = weights[1, 0] = 1.0
        with pytest.raises(DisconnectedError, match=r"\[3\]"):
            new_graph(3, weights)

    def test_asymmetric(self) -> None:
        """Test that asymmetric weights are rejected."""
        with pytest.raises(AsymmetricWeightsError):
            new_graph(2, [[0, 1], [2, 0]])

    def test_negative(self) -> None:
        """Test that negative weights are rejected."""
        with pytest.raises(NegativeWeightError):
            new_graph(3, [[0, -1, 1], [-1, 0, 1], [1, 1, 0]])

    def test_self_loop(self) -> None:
        """Test that a nonzero diagonal is rejected."""
        with pytest.raises(SelfLoopError):
            new_graph(2, [[1, 1], [1, 0]])

    def test_wrong_shape(self) -> None:
        """Test that the matrix must be d x d."""
        with pytest.raises(GraphValidationError):
            new_graph(3, [[0, 1], [1, 0]])

    def test_too_few_vertices(self) -> None:
        """Test that a single vertex is not a graph."""
        with pytest.raises(GraphValidationError):
            new_graph(1, [[0]])

    def test_validation_errors_share_a_base(self) -> None:
        """Test that every graph error is a GraphValidationError."""
        for error in (AsymmetricWeightsError, NegativeWeightError, SelfLoopError, DisconnectedError):
            assert issubclass(error, GraphValidationError)


class TestConnectivity:
    """Tests that connectivity agrees with networkx on random graphs."""

    def test_random_graphs(self) -> None:
        """Test acceptance against nx.is_connected for random sparse weights."""
        rng = np.random.default_rng(7)
        for _ in range(100):
            d = int(rng.integers(2, 7))
            upper = np.triu(rng.uniform(0.5, 2.0, size=(d, d)) * (rng.random((d, d)) < 0.4), k=1)
            weights = upper + upper.T
            expected = nx.is_connected(nx.from_numpy_array(weights))
            if expected:
                assert new_graph(d, weights).d == d
            else:
                with pytest.raises(DisconnectedError):
                    new_graph(d, weights)


class TestNeighbors:
    """Tests for neighbors()."""

    def test_complete_triangle(self) -> None:
        """Test that every other vertex is a neighbour in the complete triangle."""
        assert neighbors(triangle(), 1) == (2, 3)

    def test_path_middle(self) -> None:
        """Test the middle vertex of a path."""
        assert neighbors(path_graph(), 2) == (1, 3)

    def test_path_end(self) -> None:
        """Test an end vertex of a path."""
        assert neighbors(path_graph(), 1) == (2,)

    def test_symmetric(self) -> None:
        """Test that j is a neighbour of i exactly when i is a neighbour of j."""
        g = new_graph(3, PATH_WEIGHTS)
        for i in range(1, 4):
            for j in neighbors(g, i):
                assert i in neighbors(g, j)

    def test_out_of_range(self) -> None:
        """Test that labels outside 1..d are rejected."""
        with pytest.raises(IndexOutOfRangeError):
            neighbors(complete_graph(3), 0)
        with pytest.raises(IndexOutOfRangeError):
            neighbors(complete_graph(3), 4)
