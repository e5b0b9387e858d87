"""``study``: rerun a configuration over the values of one parameter.

Each variant runs ``solve`` into its own subdirectory; a summary table records
how far the solution at T moved from the initial data, overall and on the
boundary.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from graph_hje.exceptions import ConfigValueError
from graph_hje.experiments.reporting import write_csv, write_manifest
from graph_hje.experiments.settings import ExperimentConfig, coerce_value
from graph_hje.experiments.solve import SolveResult, cmd_solve

logger = logging.getLogger(__name__)

STUDY_TABLE = "study_summary.csv"


@dataclass(frozen=True)
class StudyResult:
    summary: pd.DataFrame
    variants: tuple[SolveResult, ...]
    table_path: Path
    manifest_path: Path


def variant_label(parameter: str, value: str) -> str:
    return f"{parameter}_{value}"


def variant_row(label: str, result: SolveResult) -> dict[str, object]:
    trajectory = result.trajectory
    initial, final = trajectory.snapshots[0], trajectory.final
    change = np.abs(final.values - initial.values)
    boundary = trajectory.mesh.boundary_ranks
    return {
        "variant": label,
        "min_U": float(np.min(final.values)),
        "max_U": float(np.max(final.values)),
        "sup_change": float(np.max(change)),
        "boundary_sup_change": float(np.max(change[boundary])) if boundary.size else 0.0,
    }


def cmd_study(cfg: ExperimentConfig, out_dir: Optional[Path] = None) -> StudyResult:
    """Run one variant per entry of ``study_values`` for ``study_parameter``.

    Raises:
        ConfigValueError: If no study values are configured, or a value does not
            fit the swept parameter.
    """
    if not cfg.study_values:
        raise ConfigValueError(f"study needs study_values for {cfg.study_parameter}.")
    out_dir = Path(cfg.output_dir) if out_dir is None else out_dir
    parameter = cfg.study_parameter

    rows, variants = [], []
    for text in cfg.study_values:
        label = variant_label(parameter, text)
        variant = cfg.with_overrides(
            name=f"{cfg.name}/{label}",
            snapshot_times=(),
            **{parameter: coerce_value(parameter, text)},
        )
        logger.info(f"Study variant {label}")
        result = cmd_solve(variant, out_dir / label)
        variants.append(result)
        rows.append(variant_row(label, result))

    summary = pd.DataFrame(rows)
    table = write_csv(summary, out_dir / STUDY_TABLE)
    manifest = write_manifest(
        out_dir,
        {
            "command": "study",
            "config": cfg.effective_items(),
            "parameter": parameter,
            "variants": [variant_label(parameter, text) for text in cfg.study_values],
            "table": table.name,
        },
    )
    return StudyResult(summary=summary, variants=tuple(variants), table_path=table, manifest_path=manifest)
