"""Build solver objects from an ExperimentConfig."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from graph_hje.boundary import BoundaryCondition, BoundaryMode
from graph_hje.calculus import MetricTensor, tensor_by_name
from graph_hje.config import DEFAULT_EDGE_WEIGHT
from graph_hje.experiments.builtins import initial_by_name
from graph_hje.experiments.settings import ExperimentConfig
from graph_hje.graph import Graph, complete_graph, new_graph
from graph_hje.hamiltonian import (
    DiscreteHamiltonian,
    DiscreteKind,
    Hamiltonian,
    HamiltonianKind,
    Potential,
    coefficient_by_name,
    potential_by_name,
)
from graph_hje.scheme import InitialData, SchemeConfig, SchemeKind, Trajectory, run
from graph_hje.simplex_mesh import Mesh, build_mesh, build_mesh_from_levels

logger = logging.getLogger(__name__)


def build_graph(cfg: ExperimentConfig) -> Graph:
    if not cfg.weights:
        return complete_graph(cfg.vertices, DEFAULT_EDGE_WEIGHT)
    return new_graph(cfg.vertices, cfg.weights)


def build_tensor(cfg: ExperimentConfig) -> MetricTensor:
    return tensor_by_name(cfg.tensor, cfg.tensor_weights)


def build_hamiltonian(cfg: ExperimentConfig, graph: Graph) -> Hamiltonian:
    return Hamiltonian(
        graph,
        build_tensor(cfg),
        kind=HamiltonianKind(cfg.hamiltonian),
        kappa=cfg.kappa,
        coefficient=coefficient_by_name(cfg.coefficient, kappa=cfg.kappa, theta=cfg.theta),
    )


def build_discrete_hamiltonian(cfg: ExperimentConfig, graph: Graph) -> DiscreteHamiltonian:
    return DiscreteHamiltonian(
        DiscreteKind(cfg.discrete_hamiltonian),
        build_hamiltonian(cfg, graph),
        noise_intensity=cfg.noise_intensity,
        gamma=np.asarray(cfg.lf_gamma, dtype=float) if cfg.lf_gamma else None,
    )


def build_potential(cfg: ExperimentConfig) -> Potential:
    return potential_by_name(cfg.potential, value=cfg.potential_value)


def build_initial(cfg: ExperimentConfig) -> InitialData:
    return initial_by_name(cfg.initial, value=cfg.initial_value)


def build_boundary(cfg: ExperimentConfig) -> BoundaryCondition:
    mode = BoundaryMode(cfg.boundary)
    if mode is BoundaryMode.DIRICHLET:
        return BoundaryCondition.dirichlet(cfg.dirichlet_value)
    return BoundaryCondition(mode)


def build_experiment_mesh(cfg: ExperimentConfig, graph: Graph, n_levels: Optional[int] = None) -> Mesh:
    """The mesh for N = n_levels, else the configured n_levels or h."""
    levels = n_levels if n_levels is not None else cfg.n_levels
    if levels is not None:
        return build_mesh_from_levels(graph, levels, cfg.eps)
    return build_mesh(graph, cfg.h, cfg.eps)


def build_scheme_config(cfg: ExperimentConfig, mesh: Mesh) -> SchemeConfig:
    options = dict(
        eps=cfg.eps,
        boundary=build_boundary(cfg),
        scheme=SchemeKind(cfg.scheme),
        max_iters=cfg.max_iters,
        tol=cfg.tol,
        implicit_fallback=cfg.implicit_fallback,
        cfl_ratio_check=cfg.cfl_ratio_check,
        strict_cfl=cfg.strict_cfl,
        gradient_radius=cfg.gradient_radius,
    )
    if cfg.tau is not None:
        return SchemeConfig(h=mesh.h, tau=cfg.tau, T=cfg.final_time, **options)
    return SchemeConfig.from_ratio(mesh.h, cfg.ratio, cfg.final_time, **options)


@dataclass(frozen=True, eq=False)
class Experiment:
    """Everything a run needs, assembled for one mesh resolution."""

    config: ExperimentConfig
    graph: Graph
    mesh: Mesh
    hamiltonian: DiscreteHamiltonian
    potential: Potential
    initial: InitialData
    scheme: SchemeConfig

    def run(self, probes: Optional[tuple[float, ...]] = None) -> Trajectory:
        return run(
            self.initial,
            self.hamiltonian,
            self.potential,
            self.scheme,
            probes,
            mesh=self.mesh,
            rng=np.random.default_rng(self.config.seed),
        )


def assemble(cfg: ExperimentConfig, n_levels: Optional[int] = None) -> Experiment:
    """Assemble a configuration, optionally at another resolution N."""
    graph = build_graph(cfg)
    mesh = build_experiment_mesh(cfg, graph, n_levels)
    experiment = Experiment(
        config=cfg,
        graph=graph,
        mesh=mesh,
        hamiltonian=build_discrete_hamiltonian(cfg, graph),
        potential=build_potential(cfg),
        initial=build_initial(cfg),
        scheme=build_scheme_config(cfg, mesh),
    )
    logger.debug(
        f"Assembled {cfg.name!r}: N={mesh.n_levels}, h={mesh.h:.6g}, tau={experiment.scheme.tau:.6g}"
    )
    return experiment
