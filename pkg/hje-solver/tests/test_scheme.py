"""Tests for the explicit and implicit schemes and their diagnostics."""

from __future__ import annotations

import itertools
import logging

import numpy as np
import pytest

from graph_hje.boundary import BoundaryCondition
from graph_hje.calculus import AverageTensor, LogarithmicTensor
from graph_hje.exceptions import (
    CflViolationError,
    NonFiniteValueError,
    NotInteriorError,
    SchemeConfigError,
)
from graph_hje.experiments.builtins import ConstantInitial, squared_l2
from graph_hje.graph import complete_graph, new_graph
from graph_hje.hamiltonian import (
    ConstantPotential,
    DiscreteHamiltonian,
    DiscreteKind,
    Hamiltonian,
    InverseInformationPower,
    ZeroPotential,
)
from graph_hje.scheme import (
    GridFunction,
    SchemeConfig,
    SchemeKind,
    cfl_validate,
    difference_matrices,
    explicit_step,
    extrapolate,
    gradient_bound,
    implicit_step,
    run,
    time_lipschitz_bound,
)
from graph_hje.simplex_mesh import BoundaryExit, OffsetVector, build_mesh, build_mesh_from_levels, shift_index
from tests.hje_test_fixtures import triangle


def osher_sethian(noise: float = 0.5, graph=None) -> DiscreteHamiltonian:
    graph = triangle() if graph is None else graph
    base = Hamiltonian(graph, AverageTensor(), coefficient=InverseInformationPower(2.0))
    return DiscreteHamiltonian(DiscreteKind.OSHER_SETHIAN, base, noise_intensity=noise)


def pure_noise() -> DiscreteHamiltonian:
    base = Hamiltonian.zero(triangle(), LogarithmicTensor())
    return DiscreteHamiltonian(DiscreteKind.OSHER_SETHIAN, base, noise_intensity=1.0)


class TestSchemeConfig:
    """Tests for time step configuration."""

    def test_from_ratio_divides_final_time(self) -> None:
        """Test that tau is the largest step below ratio*h dividing T."""
        cfg = SchemeConfig.from_ratio(0.1, 0.3, 1.0, eps=0.0)
        assert cfg.tau == pytest.approx(1.0 / 34)
        assert cfg.n_steps == 34
        assert cfg.tau <= 0.03

    def test_from_ratio_exact(self) -> None:
        """Test that an exact quotient keeps tau = ratio*h."""
        cfg = SchemeConfig.from_ratio(0.125, 0.1, 0.5, eps=0.0)
        assert cfg.n_steps == 40
        assert cfg.ratio == pytest.approx(0.1)

    def test_zero_final_time(self) -> None:
        """Test that T = 0 gives no steps."""
        assert SchemeConfig.from_ratio(0.1, 0.05, 0.0, eps=0.0).n_steps == 0

    def test_non_integer_steps(self) -> None:
        """Test that T/tau must be an integer."""
        with pytest.raises(SchemeConfigError):
            SchemeConfig(h=0.1, tau=0.3, eps=0.0, T=1.0)

    def test_invalid_values(self) -> None:
        """Test range checks."""
        with pytest.raises(SchemeConfigError):
            SchemeConfig(h=0.0, tau=0.1, eps=0.0, T=1.0)
        with pytest.raises(SchemeConfigError):
            SchemeConfig(h=0.1, tau=0.1, eps=0.0, T=1.0, max_iters=0)
        with pytest.raises(SchemeConfigError):
            SchemeConfig.from_ratio(0.1, 0.0, 1.0, eps=0.0)

    def test_step_of(self) -> None:
        """Test snapshot time lookup on the time grid."""
        cfg = SchemeConfig(h=0.1, tau=0.25, eps=0.0, T=1.0)
        assert cfg.step_of(0.5) == 2
        with pytest.raises(SchemeConfigError):
            cfg.step_of(0.3)
        with pytest.raises(SchemeConfigError):
            cfg.step_of(1.25)


class TestGridFunction:
    """Tests for GridFunction."""

    def test_sample(self) -> None:
        """Test sampling a function at every node."""
        mesh = build_mesh_from_levels(triangle(), 4, 0.0)
        grid = GridFunction.sample(mesh, squared_l2)
        np.testing.assert_allclose(grid.values, np.sum(mesh.nodes**2, axis=1))
        assert grid.at((0, 0)) == pytest.approx(1.0)

    def test_sample_constant(self) -> None:
        """Test that scalar-valued data broadcasts."""
        mesh = build_mesh_from_levels(triangle(), 4, 0.0)
        assert GridFunction.sample(mesh, ConstantInitial(2.0)).sup_norm() == 2.0

    def test_rejects_non_finite(self) -> None:
        """Test that NaN values are rejected."""
        mesh = build_mesh_from_levels(triangle(), 4, 0.0)
        values = np.zeros(mesh.size)
        values[3] = np.nan
        with pytest.raises(NonFiniteValueError):
            GridFunction(mesh, values)

    def test_rejects_wrong_size(self) -> None:
        """Test that one value per node is required."""
        mesh = build_mesh_from_levels(triangle(), 4, 0.0)
        with pytest.raises(SchemeConfigError):
            GridFunction(mesh, np.zeros(mesh.size + 1))


class TestDifferences:
    """Tests for D+ and D- and boundary lookups."""

    def test_constant(self) -> None:
        """Test that constants have zero differences."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        grid = GridFunction.sample(mesh, ConstantInitial(1.5))
        plus, minus = difference_matrices(grid, (2, 5), BoundaryCondition.linear())
        np.testing.assert_array_equal(plus.upper, np.zeros(3))
        np.testing.assert_array_equal(minus.upper, np.zeros(3))

    def test_affine(self) -> None:
        """Test that <a, xi> has differences sqrt(omega_jk)(a_j - a_k) exactly."""
        g = new_graph(3, [[0, 4, 1], [4, 0, 9], [1, 9, 0]])
        mesh = build_mesh_from_levels(g, 8, 0.01)
        a = np.array([1.0, -2.0, 0.5])
        grid = GridFunction.sample(mesh, lambda xi: xi @ a)
        expected = np.array([2.0 * 3.0, 1.0 * 0.5, 3.0 * -2.5])
        for index in [(1, 2), (1, 7), (4, 5), (3, 6)]:
            plus, minus = difference_matrices(grid, index, BoundaryCondition.linear())
            np.testing.assert_allclose(plus.upper, expected, atol=1e-12)
            np.testing.assert_allclose(minus.upper, expected, atol=1e-12)

    def test_non_edge_is_weighted_by_zero(self) -> None:
        """Test that a pair without an edge has a zero difference."""
        g = new_graph(3, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])
        mesh = build_mesh_from_levels(g, 8, 0.01)
        grid = GridFunction.sample(mesh, squared_l2)
        plus, minus = difference_matrices(grid, (3, 5), BoundaryCondition.linear())
        assert plus.entry(1, 3) == 0.0 and minus.entry(1, 3) == 0.0

    def test_boundary_index(self) -> None:
        """Test that differences need an interior index."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        grid = GridFunction.sample(mesh, squared_l2)
        with pytest.raises(NotInteriorError):
            difference_matrices(grid, (0, 3), BoundaryCondition.linear())

    def test_extrapolate_segment(self) -> None:
        """Test constant and linear values at the left exit of the segment (4, 7)."""
        mesh = build_mesh_from_levels(complete_graph(2), 3, 0.0)
        grid = GridFunction(mesh, np.array([0.0, 4.0, 7.0, 0.0]))
        exit_left = shift_index(mesh, (1,), OffsetVector(1, 2, 2), -1)
        assert isinstance(exit_left, BoundaryExit)
        assert extrapolate(grid, exit_left, BoundaryCondition.constant()) == 4.0
        assert extrapolate(grid, exit_left, BoundaryCondition.linear()) == 1.0

    def test_extrapolate_outside(self) -> None:
        """Test a target one step outside the mesh under linear reflection."""
        mesh = build_mesh_from_levels(complete_graph(2), 3, 0.0)
        grid = GridFunction(mesh, np.array([0.0, 4.0, 7.0, 0.0]))
        outside = BoundaryExit(
            origin=(0,),
            offset=OffsetVector(1, 2, 2),
            direction=-1,
            target=(-1,),
            point=np.array([-1 / 3, 4 / 3]),
            admissible=False,
        )
        # Reflects through the boundary node 0, whose filled value is 2*4 - 7 = 1.
        assert extrapolate(grid, outside, BoundaryCondition.linear()) == pytest.approx(2 * 1.0 - 4.0)
        assert extrapolate(grid, outside, BoundaryCondition.constant()) == 4.0

    def test_extrapolate_constant_data(self) -> None:
        """Test that both modes return c for constant data."""
        mesh = build_mesh_from_levels(triangle(), 6, 0.01)
        grid = GridFunction.sample(mesh, ConstantInitial(-0.75))
        target = shift_index(mesh, (1, 2), OffsetVector(1, 2, 3), 1)
        for condition in (BoundaryCondition.constant(), BoundaryCondition.linear()):
            assert extrapolate(grid, target, condition) == pytest.approx(-0.75, abs=1e-14)
        assert extrapolate(grid, target, BoundaryCondition.dirichlet(3.0)) == 3.0


class TestExplicitStep:
    """Tests for one explicit step."""

    def test_constant_is_stationary(self) -> None:
        """Test that constants are exact solutions without a potential."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 0.05, 0.1, eps=0.01)
        grid = GridFunction.sample(mesh, ConstantInitial(2.0))
        np.testing.assert_allclose(explicit_step(grid, osher_sethian(), ZeroPotential(), cfg).values, 2.0)

    def test_pure_forcing(self) -> None:
        """Test U^1 = -tau f0 from zero data under a constant potential."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 0.05, 0.1, eps=0.01)
        grid = GridFunction.sample(mesh, ConstantInitial(0.0))
        following = explicit_step(grid, osher_sethian(), ConstantPotential(3.0), cfg)
        np.testing.assert_allclose(following.interior_values, -cfg.tau * 3.0, rtol=1e-14)

    def test_matches_hand_evaluation(self) -> None:
        """Test one pure-noise step at an interior node against a scalar evaluation."""
        mesh = build_mesh(triangle(), 0.125, 0.0)
        tau = 0.125 * 0.05
        cfg = SchemeConfig(h=0.125, tau=tau, eps=0.0, T=tau)
        grid = GridFunction.sample(mesh, squared_l2)
        following = explicit_step(grid, pure_noise(), ZeroPotential(), cfg)

        xi = np.array([3.0, 2.0, 3.0]) / 8.0
        h = 0.125

        def value(point: np.ndarray) -> float:
            return float(np.sum(point**2))

        update = 0.0
        for j, k in itertools.combinations(range(3), 2):
            step = np.zeros(3)
            step[j], step[k] = h, -h
            if xi[j] <= xi[k]:
                difference = (value(xi + step) - value(xi)) / h
            else:
                difference = (value(xi) - value(xi - step)) / h
            update += (xi[j] - xi[k]) * difference
        expected = value(xi) - tau * update
        assert following.at((3, 5)) == pytest.approx(expected, abs=1e-14)

    def test_ratio_check(self) -> None:
        """Test that a configured ratio bound rejects larger steps."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 0.5, 0.5, eps=0.01, cfl_ratio_check=0.1)
        grid = GridFunction.sample(mesh, squared_l2)
        with pytest.raises(CflViolationError):
            explicit_step(grid, osher_sethian(), ZeroPotential(), cfg)


class TestImplicitStep:
    """Tests for the fixed-point implicit step."""

    def test_constant_converges_at_once(self) -> None:
        """Test that a constant is a fixed point after one sweep with residual 0."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 0.05, 0.1, eps=0.01, scheme=SchemeKind.IMPLICIT)
        grid = GridFunction.sample(mesh, ConstantInitial(1.25))
        outcome = implicit_step(grid, osher_sethian(), ZeroPotential(), cfg)
        assert outcome.iterations == 1
        assert outcome.residual == 0.0
        np.testing.assert_allclose(outcome.grid.values, 1.25)

    def test_unpacks_as_triple(self) -> None:
        """Test that the outcome unpacks as (grid, residual, iterations)."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 0.05, 0.1, eps=0.01, scheme=SchemeKind.IMPLICIT)
        grid, residual, iterations = implicit_step(
            GridFunction.sample(mesh, squared_l2), osher_sethian(), ZeroPotential(), cfg
        )
        assert grid.mesh is mesh
        assert residual <= cfg.tol
        assert 1 <= iterations <= cfg.max_iters

    def test_small_steps_change_little(self) -> None:
        """Test that one implicit step moves values by O(tau)."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        grid = GridFunction.sample(mesh, squared_l2)
        changes = []
        for tau in (1e-3, 1e-4):
            cfg = SchemeConfig(h=mesh.h, tau=tau, eps=0.01, T=tau, scheme=SchemeKind.IMPLICIT)
            outcome = implicit_step(grid, osher_sethian(), ZeroPotential(), cfg)
            changes.append(np.max(np.abs(outcome.grid.interior_values - grid.interior_values)))
        assert changes[1] < changes[0]
        assert changes[1] / 1e-4 == pytest.approx(changes[0] / 1e-3, rel=0.05)

    def test_agrees_with_explicit_for_small_tau(self) -> None:
        """Test that both steps agree to O(tau^2) for a small step."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        tau = 1e-5
        grid = GridFunction.sample(mesh, squared_l2)
        explicit = explicit_step(
            grid, osher_sethian(), ZeroPotential(), SchemeConfig(h=mesh.h, tau=tau, eps=0.01, T=tau)
        )
        implicit = implicit_step(
            grid,
            osher_sethian(),
            ZeroPotential(),
            SchemeConfig(h=mesh.h, tau=tau, eps=0.01, T=tau, scheme=SchemeKind.IMPLICIT, tol=1e-14),
        ).grid
        assert np.max(np.abs(explicit.values - implicit.values)) < 1e-6

    def test_diverging_iteration_switches_to_jacobi(self) -> None:
        """Test that a large step falls back to Jacobi sweeps and stays finite."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        tau = 40 * mesh.h
        cfg = SchemeConfig(
            h=mesh.h,
            tau=tau,
            eps=0.01,
            T=tau,
            boundary=BoundaryCondition.constant(),
            scheme=SchemeKind.IMPLICIT,
            max_iters=50,
        )
        outcome = implicit_step(GridFunction.sample(mesh, squared_l2), pure_noise(), ZeroPotential(), cfg)
        assert outcome.used_fallback
        assert np.all(np.isfinite(outcome.grid.values))

    @pytest.mark.parametrize("max_iters", [2, 3, 4, 5, 6])
    def test_step_advances_for_every_sweep_limit(self, max_iters: int) -> None:
        """Test that a switch to Jacobi sweeps on the last allowed sweep still advances the step."""
        mesh = build_mesh_from_levels(triangle(), 32, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 1.0, 0.4, eps=0.01, scheme=SchemeKind.IMPLICIT, max_iters=max_iters)
        U = GridFunction.sample(mesh, squared_l2)
        G = osher_sethian(noise=1.0)
        outcome = implicit_step(U, G, ZeroPotential(), cfg)
        assert np.max(np.abs(outcome.grid.interior_values - U.interior_values)) > 0
        assert 1 <= outcome.iterations <= max_iters
        if max_iters >= 4:
            assert outcome.used_fallback

    @pytest.mark.parametrize("max_iters", [1, 4, 10])
    def test_residual_belongs_to_returned_grid(self, max_iters: int) -> None:
        """Test residual = max |U' - U + tau G(D+U', D-U')| for the grid that is returned."""
        mesh = build_mesh_from_levels(triangle(), 32, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 1.0, 0.4, eps=0.01, scheme=SchemeKind.IMPLICIT, max_iters=max_iters)
        U = GridFunction.sample(mesh, squared_l2)
        G = osher_sethian(noise=1.0)
        outcome = implicit_step(U, G, ZeroPotential(), cfg)
        # explicit_step(V) = V - tau G(D+V, D-V) on interior nodes
        advanced = explicit_step(outcome.grid, G, ZeroPotential(), cfg).interior_values
        expected = np.max(np.abs(2.0 * outcome.grid.interior_values - advanced - U.interior_values))
        assert outcome.residual == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_unconverged_step_warns(self, caplog: pytest.LogCaptureFixture) -> None:
        """Test that a residual above tol is logged."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        tau = 0.05 * mesh.h
        cfg = SchemeConfig(h=mesh.h, tau=tau, eps=0.01, T=tau, scheme=SchemeKind.IMPLICIT, max_iters=1, tol=1e-15)
        with caplog.at_level(logging.WARNING, logger="graph_hje.scheme"):
            outcome = implicit_step(GridFunction.sample(mesh, squared_l2), osher_sethian(), ZeroPotential(), cfg)
        assert outcome.residual > cfg.tol
        assert "not converged" in caplog.text


class TestEstimates:
    """Tests for gradient, CFL and time-derivative estimates."""

    def test_gradient_bound(self) -> None:
        """Test R = 1 + max |difference| / h."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.0)
        assert gradient_bound(GridFunction.sample(mesh, ConstantInitial(3.0))) == 1.0
        affine = GridFunction.sample(mesh, lambda xi: xi @ np.array([1.0, 0.0, 0.0]))
        assert gradient_bound(affine) == pytest.approx(2.0)

    def test_zero_hamiltonian_without_noise_always_passes(self) -> None:
        """Test that C = 0 gives an infinite bound."""
        G = DiscreteHamiltonian(
            DiscreteKind.OSHER_SETHIAN, Hamiltonian.zero(triangle(), AverageTensor()), noise_intensity=0.0
        )
        cfg = SchemeConfig.from_ratio(0.1, 100.0, 10.0, eps=0.01)
        report = cfl_validate(G, cfg, 1.0)
        assert report.passed
        assert report.bound == float("inf")

    def test_reference_ratio_passes(self) -> None:
        """Test that tau/h = 0.05 passes for the reference Hamiltonian."""
        mesh = build_mesh_from_levels(triangle(), 16, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 0.05, 0.4, eps=0.01)
        R = gradient_bound(GridFunction.sample(mesh, squared_l2))
        assert cfl_validate(osher_sethian(), cfg, R).passed

    def test_large_ratio_fails(self) -> None:
        """Test that tau/h = 10 fails and raises in strict mode."""
        cfg = SchemeConfig.from_ratio(0.1, 10.0, 1.0, eps=0.01)
        report = cfl_validate(osher_sethian(), cfg, 1.0)
        assert not report.passed
        assert report.bound < 10.0
        strict = SchemeConfig.from_ratio(0.1, 10.0, 1.0, eps=0.01, strict_cfl=True)
        with pytest.raises(CflViolationError):
            cfl_validate(osher_sethian(), strict, 1.0)

    def test_deterministic_for_a_seed(self) -> None:
        """Test that the sampled estimate is reproducible."""
        cfg = SchemeConfig.from_ratio(0.1, 0.05, 1.0, eps=0.01)
        first = cfl_validate(osher_sethian(), cfg, 2.0, rng=np.random.default_rng(3))
        second = cfl_validate(osher_sethian(), cfg, 2.0, rng=np.random.default_rng(3))
        assert first == second

    def test_time_lipschitz_bounds_explicit_steps(self) -> None:
        """Test |U^{n+1} - U^n| <= K tau for one explicit step."""
        mesh = build_mesh_from_levels(triangle(), 16, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 0.05, 0.4, eps=0.01)
        grid = GridFunction.sample(mesh, squared_l2)
        G = osher_sethian()
        K = time_lipschitz_bound(G, ZeroPotential(), mesh, gradient_bound(grid))
        following = explicit_step(grid, G, ZeroPotential(), cfg)
        assert np.max(np.abs(following.interior_values - grid.interior_values)) <= K * cfg.tau + 1e-14


class TestRun:
    """Tests for complete runs."""

    def test_no_steps(self) -> None:
        """Test that T = 0 returns the sampled initial data."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 0.05, 0.0, eps=0.01)
        trajectory = run(squared_l2, osher_sethian(), ZeroPotential(), cfg, mesh=mesh)
        assert len(trajectory.snapshots) == 1
        np.testing.assert_array_equal(trajectory.final.values, GridFunction.sample(mesh, squared_l2).values)

    def test_snapshots_at_probe_times(self) -> None:
        """Test that probes select the stored grid functions."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        cfg = SchemeConfig(h=mesh.h, tau=0.002, eps=0.01, T=0.02)
        trajectory = run(squared_l2, osher_sethian(), ZeroPotential(), cfg, (0.01, 0.0, 0.02), mesh=mesh)
        assert trajectory.times == (0.0, 0.01, 0.02)
        assert len(trajectory.max_norms) == cfg.n_steps + 1

    def test_uniform_bound_with_potential(self) -> None:
        """Test sup|U^n| <= ||U^0|| + t_n ||F|| along an explicit run."""
        mesh = build_mesh_from_levels(triangle(), 16, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 0.05, 0.2, eps=0.01, boundary=BoundaryCondition.constant())
        trajectory = run(squared_l2, osher_sethian(), ConstantPotential(-0.5), cfg, mesh=mesh)
        assert trajectory.within_bound
        assert np.all(trajectory.max_norms <= trajectory.bounds)
        assert trajectory.cfl is not None and trajectory.cfl.passed

    def test_explicit_and_implicit_agree(self) -> None:
        """Test that both schemes agree to O(tau) at T."""
        mesh = build_mesh_from_levels(triangle(), 32, 0.01)
        explicit_cfg = SchemeConfig.from_ratio(mesh.h, 0.05, 0.1, eps=0.01)
        implicit_cfg = SchemeConfig.from_ratio(mesh.h, 0.05, 0.1, eps=0.01, scheme=SchemeKind.IMPLICIT)
        explicit = run(squared_l2, osher_sethian(), ZeroPotential(), explicit_cfg, mesh=mesh)
        implicit = run(squared_l2, osher_sethian(), ZeroPotential(), implicit_cfg, mesh=mesh)
        difference = np.max(np.abs(explicit.final.values - implicit.final.values))
        assert difference <= 10 * explicit_cfg.tau
        assert len(implicit.residuals) == implicit_cfg.n_steps

    def test_lax_friedrichs_gets_default_gamma(self) -> None:
        """Test that a Lax-Friedrichs run derives and reports its dissipation."""
        mesh = build_mesh_from_levels(triangle(), 8, 0.01)
        cfg = SchemeConfig.from_ratio(mesh.h, 0.05, 0.05, eps=0.01)
        G = DiscreteHamiltonian(DiscreteKind.LAX_FRIEDRICHS, osher_sethian().base, noise_intensity=0.5)
        trajectory = run(squared_l2, G, ZeroPotential(), cfg, mesh=mesh)
        assert trajectory.gamma is not None
        assert all(g > 0 for g in trajectory.gamma)

    def test_blow_up_is_detected(self) -> None:
        """Test that an unstable explicit run raises instead of returning garbage."""
        mesh = build_mesh_from_levels(triangle(), 16, 0.01)
        cfg = SchemeConfig(h=mesh.h, tau=mesh.h * 20.0, eps=0.01, T=mesh.h * 20.0 * 200)
        with pytest.raises(NonFiniteValueError):
            run(squared_l2, pure_noise(), ZeroPotential(), cfg, mesh=mesh)
