"""``mesh``: write every mesh node in both coordinate systems."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from graph_hje.experiments.assembly import build_experiment_mesh, build_graph
from graph_hje.experiments.reporting import node_frame, write_csv
from graph_hje.experiments.settings import ExperimentConfig

logger = logging.getLogger(__name__)

MESH_TABLE = "mesh.csv"


def cmd_mesh(cfg: ExperimentConfig, out_dir: Optional[Path] = None) -> Path:
    """Columns: rank, indices i, tuple coordinates s = i*h, simplex point xi,
    planar coordinates when d = 3, and the boundary flag."""
    out_dir = Path(cfg.output_dir) if out_dir is None else out_dir
    mesh = build_experiment_mesh(cfg, build_graph(cfg))
    frame = node_frame(mesh)
    frame.insert(0, "rank", range(mesh.size))
    width = mesh.indices.shape[1]
    for position in range(width):
        frame.insert(1 + width + position, f"s{position + 1}", mesh.indices[:, position] * mesh.h)
    frame["boundary"] = mesh.boundary_mask.astype(int)
    logger.info(f"Mesh N={mesh.n_levels}: {mesh.size} nodes, {int(mesh.boundary_mask.sum())} on the boundary")
    return write_csv(frame, out_dir / MESH_TABLE)
