"""``convergence``: errors at T against a refined run of the same scheme."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from graph_hje.exceptions import NonNestedMeshesError
from graph_hje.experiments.assembly import assemble
from graph_hje.experiments.reporting import (
    ErrorReport,
    ErrorRow,
    error_report,
    grid_errors,
    write_error_report,
    write_manifest,
)
from graph_hje.experiments.settings import ExperimentConfig
from graph_hje.scheme import GridFunction

logger = logging.getLogger(__name__)

CONVERGENCE_TABLE = "convergence.csv"


@dataclass(frozen=True)
class ConvergenceResult:
    report: ErrorReport
    table_path: Path
    manifest_path: Path


def check_nested(resolutions: Sequence[int], reference_levels: int) -> None:
    """Every resolution must be below the reference and divide it.

    Raises:
        NonNestedMeshesError: Otherwise, or if resolutions are not strictly increasing.
    """
    if not resolutions:
        raise NonNestedMeshesError("A convergence study needs at least one resolution.")
    if any(a >= b for a, b in zip(resolutions, resolutions[1:])):
        raise NonNestedMeshesError(f"Resolutions must be strictly increasing, got {list(resolutions)}.")
    bad = [n for n in resolutions if n >= reference_levels or reference_levels % n]
    if bad:
        raise NonNestedMeshesError(
            f"Reference resolution N={reference_levels} does not refine N={bad}.\n"
            f"The reference N must exceed and be a multiple of every study resolution."
        )


def restrict(reference: GridFunction, coarse: GridFunction) -> np.ndarray:
    """Reference values at the coarse nodes: coarse index i maps to i * (N_ref / N)."""
    factor = reference.mesh.n_levels // coarse.mesh.n_levels
    ranks = reference.mesh.ranks(coarse.mesh.indices * factor)
    return reference.values[ranks]


def cmd_convergence(
    cfg: ExperimentConfig,
    resolutions: Optional[Sequence[int]] = None,
    out_dir: Optional[Path] = None,
) -> ConvergenceResult:
    """Run every resolution and the reference, and tabulate the errors at T."""
    resolutions = tuple(cfg.resolutions if resolutions is None else resolutions)
    out_dir = Path(cfg.output_dir) if out_dir is None else out_dir
    check_nested(resolutions, cfg.reference_levels)

    logger.info(f"Reference run at N={cfg.reference_levels}")
    reference_experiment = assemble(cfg, n_levels=cfg.reference_levels)
    started = time.perf_counter()
    reference = reference_experiment.run().final
    reference_seconds = time.perf_counter() - started

    rows = []
    for n in resolutions:
        experiment = assemble(cfg, n_levels=n)
        started = time.perf_counter()
        final = experiment.run().final
        seconds = time.perf_counter() - started
        linf, l1 = grid_errors(final.values, restrict(reference, final))
        logger.info(f"N={n}: Linf error {linf:.6e}, L1 error {l1:.6e} ({seconds:.2f}s)")
        rows.append(ErrorRow(n, experiment.mesh.h, experiment.scheme.tau, linf, l1, seconds))
    report = error_report(rows)

    table = write_error_report(report, out_dir / CONVERGENCE_TABLE)
    manifest = write_manifest(
        out_dir,
        {
            "command": "convergence",
            "config": cfg.effective_items(),
            "reference": {
                "n_levels": cfg.reference_levels,
                "tau": reference_experiment.scheme.tau,
                "runtime_seconds": reference_seconds,
            },
            "runtime_seconds": {str(n): s for n, s in zip(resolutions, report.frame["runtime_seconds"])},
            "table": table.name,
        },
    )
    return ConvergenceResult(report=report, table_path=table, manifest_path=manifest)
