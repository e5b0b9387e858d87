"""``oracle-compare``: errors at T against the exact pure-noise solution."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from graph_hje.exceptions import ConfigNotOracleCompatibleError
from graph_hje.experiments.assembly import assemble, build_graph, build_initial
from graph_hje.experiments.reporting import (
    ErrorReport,
    ErrorRow,
    error_report,
    grid_errors,
    write_error_report,
    write_manifest,
)
from graph_hje.experiments.settings import ExperimentConfig
from graph_hje.markov_oracle import exact_noise_solution, generator

logger = logging.getLogger(__name__)

ORACLE_TABLE = "oracle_errors.csv"


@dataclass(frozen=True)
class OracleResult:
    report: ErrorReport
    table_path: Path
    manifest_path: Path


def check_oracle_compatible(cfg: ExperimentConfig) -> None:
    """The exact solution only covers d_t u = O_xi(grad_W u).

    Raises:
        ConfigNotOracleCompatibleError: Unless H = 0, F = 0, the tensor is
            logarithmic and lambda_1 = 1.
    """
    problems = []
    if cfg.hamiltonian != "zero":
        problems.append(f"hamiltonian = {cfg.hamiltonian} (need zero)")
    if not (cfg.potential == "zero" or cfg.potential_value == 0.0):
        problems.append(f"potential = {cfg.potential} {cfg.potential_value} (need zero)")
    if cfg.tensor != "logarithmic":
        problems.append(f"tensor = {cfg.tensor} (need logarithmic)")
    if cfg.noise_intensity != 1.0:
        problems.append(f"noise_intensity = {cfg.noise_intensity} (need 1)")
    if problems:
        raise ConfigNotOracleCompatibleError(
            "The Markov oracle only solves the pure-noise equation:\n  " + "\n  ".join(problems)
        )


def cmd_oracle_compare(
    cfg: ExperimentConfig,
    resolutions: Optional[Sequence[int]] = None,
    out_dir: Optional[Path] = None,
) -> OracleResult:
    """Compare each resolution's solution at T with U0(exp(TA) xi) at every node."""
    check_oracle_compatible(cfg)
    resolutions = tuple(cfg.resolutions if resolutions is None else resolutions)
    out_dir = Path(cfg.output_dir) if out_dir is None else out_dir
    gen = generator(build_graph(cfg))
    U0 = build_initial(cfg)

    rows = []
    for n in resolutions:
        experiment = assemble(cfg, n_levels=n)
        started = time.perf_counter()
        final = experiment.run().final
        seconds = time.perf_counter() - started
        exact = exact_noise_solution(gen, U0, cfg.final_time, experiment.mesh.nodes)
        linf, l1 = grid_errors(final.values, exact)
        logger.info(f"N={n}: Linf error {linf:.6e}, L1 error {l1:.6e} against the exact solution")
        rows.append(ErrorRow(n, experiment.mesh.h, experiment.scheme.tau, linf, l1, seconds))
    report = error_report(rows)

    table = write_error_report(report, out_dir / ORACLE_TABLE)
    manifest = write_manifest(
        out_dir,
        {
            "command": "oracle-compare",
            "config": cfg.effective_items(),
            "generator": gen.matrix,
            "runtime_seconds": {str(n): s for n, s in zip(resolutions, report.frame["runtime_seconds"])},
            "table": table.name,
        },
    )
    return OracleResult(report=report, table_path=table, manifest_path=manifest)
