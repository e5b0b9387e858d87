"""``solve``: run one configuration and write solution snapshots."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from graph_hje.experiments.assembly import Experiment, assemble
from graph_hje.experiments.reporting import (
    snapshot_filename,
    snapshot_frame,
    trajectory_summary,
    write_csv,
    write_manifest,
)
from graph_hje.experiments.settings import ExperimentConfig
from graph_hje.hamiltonian import DiscreteKind
from graph_hje.scheme import Trajectory, time_lipschitz_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveResult:
    trajectory: Trajectory
    snapshot_paths: tuple[Path, ...]
    manifest_path: Path


def snapshot_times(cfg: ExperimentConfig) -> tuple[float, ...]:
    if cfg.snapshot_times:
        return tuple(sorted(set(cfg.snapshot_times)))
    return (0.0, cfg.final_time)


def time_lipschitz(experiment: Experiment, trajectory: Trajectory) -> float:
    G = experiment.hamiltonian
    if G.kind is DiscreteKind.LAX_FRIEDRICHS and trajectory.gamma is not None:
        G = G.with_gamma(trajectory.gamma)
    return time_lipschitz_bound(G, experiment.potential, experiment.mesh, trajectory.gradient_radius)


def cmd_solve(cfg: ExperimentConfig, out_dir: Optional[Path] = None) -> SolveResult:
    """Run ``cfg`` and write one CSV per snapshot time plus a JSON manifest.

    Snapshot columns are the mesh index, the simplex point, the planar plot
    coordinates (d = 3) and U.
    """
    out_dir = Path(cfg.output_dir) if out_dir is None else out_dir
    experiment = assemble(cfg)
    trajectory = experiment.run(snapshot_times(cfg))

    paths = []
    for t, grid in zip(trajectory.times, trajectory.snapshots):
        step = experiment.scheme.step_of(t)
        paths.append(write_csv(snapshot_frame(grid), out_dir / snapshot_filename(step)))

    record = trajectory_summary(trajectory)
    record["time_lipschitz_bound"] = time_lipschitz(experiment, trajectory)
    record["snapshots"] = [
        {"time": t, "file": path.name} for t, path in zip(trajectory.times, paths)
    ]
    manifest = write_manifest(
        out_dir, {"command": "solve", "config": cfg.effective_items(), "run": record}
    )
    return SolveResult(trajectory=trajectory, snapshot_paths=tuple(paths), manifest_path=manifest)
