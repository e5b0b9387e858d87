"""Tests for the graph-hje command line."""

from __future__ import annotations

from pathlib import Path

import pytest

from graph_hje.experiments.cli import (
    EXIT_CONFIGURATION_ERROR,
    EXIT_NUMERICAL_ERROR,
    EXIT_OK,
    build_parser,
    main,
    resolve_config,
)

TINY = ["--set", "n_levels=8", "--set", "final_time=0.05"]


def write_config(directory: Path, text: str) -> Path:
    path = directory / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return path


class TestResolveConfig:
    """Tests for combining the file with command-line overrides."""

    def test_overrides(self, tmp_path: Path) -> None:
        """Test that flags replace file values."""
        config = write_config(tmp_path, "eps = 0.02\nresolutions = 8, 16\n")
        args = build_parser().parse_args(
            [
                "convergence",
                "--config", str(config),
                "--out", str(tmp_path / "out"),
                "--resolutions", "4, 8",
                "--snapshot-times", "0, 0.1",
                "--strict-cfl",
                "--set", "noise_intensity=2",
            ]
        )
        cfg = resolve_config(args)
        assert cfg.eps == 0.02
        assert cfg.resolutions == (4, 8)
        assert cfg.snapshot_times == (0.0, 0.1)
        assert cfg.strict_cfl
        assert cfg.noise_intensity == 2.0
        assert cfg.output_dir == str(tmp_path / "out")

    def test_defaults(self) -> None:
        """Test that no file and no flags give the default configuration."""
        cfg = resolve_config(build_parser().parse_args(["mesh"]))
        assert cfg.name == "experiment"


class TestMain:
    """Tests for exit codes and outputs."""

    def test_mesh(self, tmp_path: Path) -> None:
        """Test a successful command."""
        assert main(["mesh", "--out", str(tmp_path), "--set", "n_levels=4"]) == EXIT_OK
        assert (tmp_path / "mesh.csv").exists()

    def test_solve_from_file(self, tmp_path: Path) -> None:
        """Test solve with a configuration file."""
        config = write_config(tmp_path, "n_levels = 8\nfinal_time = 0.05\nscheme = implicit\n")
        assert main(["solve", "--config", str(config), "--out", str(tmp_path / "out")]) == EXIT_OK
        assert (tmp_path / "out" / "manifest.json").exists()

    def test_convergence_prints_table(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that tables are echoed to stdout."""
        argv = ["convergence", "--out", str(tmp_path), "--resolutions", "4", "--set", "reference_levels=8"]
        assert main(argv + TINY) == EXIT_OK
        assert "Linf_error" in capsys.readouterr().out

    @pytest.mark.parametrize(
        "argv",
        [
            ["solve", "--set", "colour=blue"],
            ["solve", "--set", "eps"],
            ["solve", "--set", "eps=0.9"],
            ["solve", "--config", "does-not-exist.cfg"],
            ["oracle-compare"],
            ["convergence", "--resolutions", "16, 48"],
            ["study"],
        ],
    )
    def test_configuration_errors(self, argv: list[str], tmp_path: Path) -> None:
        """Test exit code 2 for configuration problems."""
        assert main(argv + ["--out", str(tmp_path)]) == EXIT_CONFIGURATION_ERROR

    def test_bad_config_line(self, tmp_path: Path) -> None:
        """Test exit code 2 for a malformed file."""
        config = write_config(tmp_path, "eps 0.01\n")
        assert main(["mesh", "--config", str(config), "--out", str(tmp_path)]) == EXIT_CONFIGURATION_ERROR

    def test_ratio_check_is_numerical(self, tmp_path: Path) -> None:
        """Test exit code 3 when tau/h exceeds cfl_ratio_check."""
        argv = ["solve", "--out", str(tmp_path), "--set", "cfl_ratio_check=0.01"]
        assert main(argv + TINY) == EXIT_NUMERICAL_ERROR

    def test_strict_cfl_is_numerical(self, tmp_path: Path) -> None:
        """Test exit code 3 for a ratio beyond the estimated bound in strict mode."""
        argv = ["solve", "--out", str(tmp_path), "--strict-cfl", "--set", "ratio=10"]
        assert main(argv + TINY) == EXIT_NUMERICAL_ERROR

    def test_unknown_command(self) -> None:
        """Test that argparse rejects unknown commands."""
        with pytest.raises(SystemExit) as exc_info:
            main(["plot"])
        assert exc_info.value.code == 2
