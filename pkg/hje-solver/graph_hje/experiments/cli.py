"""Command-line entry point: ``graph-hje <command> [--config FILE] [options]``.

Exit codes: 0 on success, 2 for configuration errors, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from graph_hje.exceptions import ConfigurationError, ConfigValueError, NumericalError
from graph_hje.experiments.boundary_demo import cmd_boundary_demo
from graph_hje.experiments.convergence import cmd_convergence
from graph_hje.experiments.mesh_export import cmd_mesh
from graph_hje.experiments.oracle_compare import cmd_oracle_compare
from graph_hje.experiments.settings import ExperimentConfig, coerce_value, load_config
from graph_hje.experiments.solve import cmd_solve
from graph_hje.experiments.study import cmd_study

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIGURATION_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _run_solve(cfg: ExperimentConfig) -> None:
    cmd_solve(cfg)


def _run_convergence(cfg: ExperimentConfig) -> None:
    result = cmd_convergence(cfg)
    print(result.report.frame.to_string(index=False))


def _run_oracle_compare(cfg: ExperimentConfig) -> None:
    result = cmd_oracle_compare(cfg)
    print(result.report.frame.to_string(index=False))


def _run_boundary_demo(cfg: ExperimentConfig) -> None:
    result = cmd_boundary_demo(cfg)
    print(
        f"dirichlet quotient {result.dirichlet_quotient:.6g}, "
        f"linear quotient {result.extrapolation_quotient:.6g}, ratio {result.ratio:.6g}"
    )


def _run_study(cfg: ExperimentConfig) -> None:
    result = cmd_study(cfg)
    print(result.summary.to_string(index=False))


def _run_mesh(cfg: ExperimentConfig) -> None:
    cmd_mesh(cfg)


COMMANDS: dict[str, tuple[Callable[[ExperimentConfig], None], str]] = {
    "solve": (_run_solve, "Run one configuration and write solution snapshots."),
    "convergence": (
        _run_convergence,
        "Tabulate errors at T against a refined reference run of the same scheme.",
    ),
    "oracle-compare": (
        _run_oracle_compare,
        "Tabulate errors at T against the exact solution of the pure-noise equation.",
    ),
    "boundary-demo": (
        _run_boundary_demo,
        "Compare a Dirichlet boundary with linear extrapolation near the boundary.",
    ),
    "study": (_run_study, "Rerun a configuration over the values of one parameter."),
    "mesh": (_run_mesh, "Write the mesh nodes in index and simplex coordinates."),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graph-hje",
        description="Monotone schemes for Hamilton-Jacobi equations on the Wasserstein space of a graph.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("--config", type=Path, help="Experiment file of 'key = value' lines.")
        sub.add_argument("--out", type=Path, help="Output directory (overrides output_dir).")
        sub.add_argument(
            "--resolutions",
            help="Comma-separated mesh resolutions N (overrides resolutions).",
        )
        sub.add_argument(
            "--snapshot-times",
            help="Comma-separated snapshot times (overrides snapshot_times).",
        )
        sub.add_argument(
            "--strict-cfl",
            action="store_true",
            help="Fail explicit runs whose tau/h exceeds the estimated CFL bound.",
        )
        sub.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="Override one configuration key; may be repeated.",
        )
        sub.add_argument(
            "--log-level",
            default="INFO",
            choices=["DEBUG", "INFO", "WARNING", "ERROR"],
            help="Logging verbosity.",
        )
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """The configuration file (or defaults) with the command-line overrides applied."""
    cfg = load_config(args.config) if args.config is not None else ExperimentConfig()
    items = {}
    for override in args.overrides:
        key, sep, value = override.partition("=")
        if not sep:
            raise ConfigValueError(f"--set expects KEY=VALUE, got {override!r}.")
        items[key.strip()] = coerce_value(key.strip(), value)
    if args.out is not None:
        items["output_dir"] = str(args.out)
    if args.resolutions is not None:
        items["resolutions"] = coerce_value("resolutions", args.resolutions)
    if args.snapshot_times is not None:
        items["snapshot_times"] = coerce_value("snapshot_times", args.snapshot_times)
    if args.strict_cfl:
        items["strict_cfl"] = True
    return cfg.with_overrides(**items) if items else cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)
    run_command, _ = COMMANDS[args.command]
    try:
        cfg = resolve_config(args)
        logger.info(f"Running {args.command} for {cfg.name!r}")
        run_command(cfg)
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIGURATION_ERROR
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
