"""Tables and manifests written by the experiment commands.

CSV files use '.' decimals, ',' separators, a header row and LF line endings,
with reals printed to 17 significant digits so reruns are byte-identical.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import pandas as pd

from graph_hje.config import CSV_FLOAT_FORMAT, CSV_LINE_TERMINATOR, MANIFEST_FILENAME
from graph_hje.scheme import CflReport, GridFunction, Trajectory
from graph_hje.simplex_mesh import Mesh, barycentric_xy

logger = logging.getLogger(__name__)

ERROR_COLUMNS = ("N", "h", "tau", "Linf_error", "Linf_order", "L1_error", "L1_order")


@dataclass(frozen=True)
class ErrorRow:
    N: int
    h: float
    tau: float
    Linf_error: float
    L1_error: float
    runtime_seconds: float = 0.0


@dataclass(frozen=True, eq=False)
class ErrorReport:
    """Per-resolution errors with observed orders between consecutive rows.

    The order between rows N < N' is log(e_N / e_N') / log(N' / N), which is
    log2(e_N / e_2N) when resolutions double. The first row has no order, and
    neither does a pair with a zero error.
    """

    frame: pd.DataFrame = field(repr=False)

    @property
    def linf_errors(self) -> np.ndarray:
        return self.frame["Linf_error"].to_numpy()

    @property
    def l1_errors(self) -> np.ndarray:
        return self.frame["L1_error"].to_numpy()

    @property
    def linf_orders(self) -> np.ndarray:
        return self.frame["Linf_order"].to_numpy()

    @property
    def l1_orders(self) -> np.ndarray:
        return self.frame["L1_order"].to_numpy()


def observed_orders(levels: Sequence[int], errors: Sequence[float]) -> list[float]:
    orders = [math.nan]
    for (n0, e0), (n1, e1) in zip(zip(levels, errors), zip(levels[1:], errors[1:])):
        if e0 > 0 and e1 > 0:
            orders.append(math.log(e0 / e1) / math.log(n1 / n0))
        else:
            orders.append(math.nan)
    return orders


def error_report(rows: Iterable[ErrorRow]) -> ErrorReport:
    frame = pd.DataFrame([asdict(row) for row in rows])
    if frame.empty:
        frame = pd.DataFrame(columns=[*ERROR_COLUMNS, "runtime_seconds"])
        return ErrorReport(frame)
    levels = frame["N"].tolist()
    frame["Linf_order"] = observed_orders(levels, frame["Linf_error"].tolist())
    frame["L1_order"] = observed_orders(levels, frame["L1_error"].tolist())
    return ErrorReport(frame[[*ERROR_COLUMNS, "runtime_seconds"]])


def grid_errors(approximation: np.ndarray, exact: np.ndarray) -> tuple[float, float]:
    """(max, mean) of the absolute error over every node."""
    error = np.abs(np.asarray(approximation, dtype=float) - np.asarray(exact, dtype=float))
    if error.size == 0:
        return 0.0, 0.0
    return float(np.max(error)), float(np.mean(error))


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator=CSV_LINE_TERMINATOR)
    logger.info(f"Wrote {path}")
    return path


def write_error_report(report: ErrorReport, path: Path) -> Path:
    """Write the error columns; runtimes are not reproducible and go to the manifest."""
    return write_csv(report.frame[list(ERROR_COLUMNS)], path)


def node_frame(mesh: Mesh) -> pd.DataFrame:
    """Index and simplex coordinates of every node, plus planar coordinates when d = 3."""
    columns: dict[str, np.ndarray] = {}
    for position in range(mesh.indices.shape[1]):
        columns[f"i{position + 1}"] = mesh.indices[:, position]
    for position in range(mesh.d):
        columns[f"xi{position + 1}"] = mesh.nodes[:, position]
    if mesh.d == 3:
        columns["bary_x"], columns["bary_y"] = barycentric_xy(mesh.nodes)
    return pd.DataFrame(columns)


def snapshot_frame(grid: GridFunction) -> pd.DataFrame:
    frame = node_frame(grid.mesh)
    frame["U"] = grid.values
    return frame


def snapshot_filename(step: int) -> str:
    return f"snapshot_{step:06d}.csv"


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_manifest(directory: Path, payload: dict[str, Any], filename: str = MANIFEST_FILENAME) -> Path:
    """Write a JSON manifest; non-finite reals become null."""
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / filename
    path.write_text(json.dumps(_jsonable(payload), indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def cfl_summary(report: CflReport) -> dict[str, Any]:
    return {
        "passed": report.passed,
        "ratio": report.ratio,
        "bound": report.bound,
        "lipschitz": report.lipschitz,
        "radius": report.radius,
    }


def trajectory_summary(trajectory: Trajectory) -> dict[str, Any]:
    """The run record of a manifest: grid, step count, traces and diagnostics."""
    cfg = trajectory.config
    mesh = trajectory.mesh
    return {
        "n_levels": mesh.n_levels,
        "h": cfg.h,
        "tau": cfg.tau,
        "steps": cfg.n_steps,
        "nodes": mesh.size,
        "interior_nodes": int(mesh.interior_ranks.size),
        "snapshot_times": list(trajectory.times),
        "max_norm_trace": trajectory.max_norms,
        "bound_trace": trajectory.bounds,
        "within_bound": trajectory.within_bound,
        "violations": [
            {"step": v.step, "sup": v.sup, "bound": v.bound} for v in trajectory.violations
        ],
        "implicit_residuals": list(trajectory.residuals),
        "implicit_iterations": list(trajectory.iterations),
        "fallback_steps": list(trajectory.fallback_steps),
        "time_derivative": trajectory.time_derivative,
        "gradient_radius": trajectory.gradient_radius,
        "lf_gamma": trajectory.gamma,
        "cfl": cfl_summary(trajectory.cfl) if trajectory.cfl is not None else None,
    }
