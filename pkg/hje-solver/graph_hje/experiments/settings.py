"""Experiment configuration: a flat ``key = value`` file mapped onto a frozen dataclass.

Example file::

    # Average tensor, H = I^-2 ||p||^2, explicit scheme
    name = temporal-order-explicit
    eps = 0.01
    ratio = 0.05
    final_time = 0.4
    noise_intensity = 0.5
    resolutions = 16, 32, 64, 128

Every key is a field of ``ExperimentConfig``; unknown keys are rejected. Values
are coerced by field type: reals, integers, booleans (true/false), strings,
comma-separated lists, and ``none`` for optional fields.
"""

from __future__ import annotations

import logging
import math
import textwrap
import typing
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional, Union

from graph_hje.boundary import BoundaryMode
from graph_hje.calculus import TENSORS
from graph_hje.config import DEFAULT_IMPLICIT_MAX_ITERS, DEFAULT_IMPLICIT_TOL, DEFAULT_VERTEX_COUNT
from graph_hje.exceptions import ConfigValueError, UnknownConfigKeyError
from graph_hje.experiments.builtins import INITIAL_DATA_NAMES
from graph_hje.hamiltonian import COEFFICIENT_NAMES, POTENTIAL_NAMES, DiscreteKind, HamiltonianKind
from graph_hje.scheme import SchemeKind

logger = logging.getLogger(__name__)

STUDY_PARAMETERS = ("noise_intensity", "theta", "coefficient")

# Setting one key of a pair clears the other, unless both are given together.
_EXCLUSIVE_KEYS = {"h": "n_levels", "n_levels": "h", "tau": "ratio", "ratio": "tau"}

_TRUE = frozenset({"true", "yes", "on", "1"})
_FALSE = frozenset({"false", "no", "off", "0"})


def softwrap(text: str) -> str:
    """Dedent a help string and join its wrapped lines into paragraphs."""
    paragraphs = textwrap.dedent(text).strip().split("\n\n")
    return "\n\n".join(" ".join(line.strip() for line in p.splitlines()) for p in paragraphs)


def _option(default: Any, help: str) -> Any:
    return field(default=default, metadata={"help": softwrap(help)})


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: graph, mesh, time grid, Hamiltonian, boundary, scheme and outputs."""

    name: str = _option("experiment", "Label echoed in manifests and study summaries.")

    # ----- graph and mesh -----
    vertices: int = _option(DEFAULT_VERTEX_COUNT, "Number of graph vertices d.")
    weights: tuple[float, ...] = _option(
        (),
        """
        Row-major d x d weight matrix: symmetric, nonnegative, zero diagonal and
        connected. Empty means the complete graph with unit weights.
        """,
    )
    eps: float = _option(0.01, "Truncation level; every coordinate of a mesh point is >= eps.")
    n_levels: Optional[int] = _option(
        32,
        """
        Mesh resolution N. The mesh size is then h = (1 - d*eps)/N.
        Mutually exclusive with h.
        """,
    )
    h: Optional[float] = _option(
        None,
        """
        Mesh size. (1 - d*eps)/h must be an integer. Mutually exclusive with
        n_levels.
        """,
    )

    # ----- time grid -----
    ratio: Optional[float] = _option(
        0.05,
        """
        tau/h. The time step becomes T/ceil(T/(ratio*h)), the largest step not
        above ratio*h that divides T. Mutually exclusive with tau.
        """,
    )
    tau: Optional[float] = _option(None, "Time step; T/tau must be an integer. Mutually exclusive with ratio.")
    final_time: float = _option(0.4, "Final time T.")

    # ----- Hamiltonian -----
    tensor: str = _option(
        "average", "Metric tensor: average, logarithmic, harmonic or convex_combination."
    )
    tensor_weights: tuple[float, ...] = _option(
        (), "Weights of average, logarithmic and harmonic for tensor = convex_combination."
    )
    hamiltonian: str = _option("power_norm", "power_norm for a(xi) ||p||_xi^kappa, or zero.")
    kappa: float = _option(2.0, "Homogeneity degree of the power-norm Hamiltonian, > 1.")
    coefficient: str = _option(
        "inverse_information",
        """
        Coefficient a(xi): inverse_information ((sum 1/xi_i)^-kappa),
        inverse_theta ((sum xi_i^-theta)^-2) or log_power ((sum log xi_i)^-2).
        """,
    )
    theta: float = _option(0.5, "Exponent of the inverse_theta coefficient.")
    noise_intensity: float = _option(0.5, "Intensity lambda_1 >= 0 of the graph individual noise.")
    discrete_hamiltonian: str = _option("osher_sethian", "Numerical Hamiltonian: osher_sethian or lax_friedrichs.")
    lf_gamma: tuple[float, ...] = _option(
        (),
        """
        Per-pair Lax-Friedrichs dissipation in upper-triangle order. Empty means
        derived from sampled derivatives of H.
        """,
    )

    # ----- boundary and scheme -----
    boundary: str = _option("linear", "Boundary treatment: constant, linear or dirichlet.")
    dirichlet_value: float = _option(0.0, "Boundary value for boundary = dirichlet.")
    scheme: str = _option("explicit", "Time stepping: explicit or implicit.")
    max_iters: int = _option(DEFAULT_IMPLICIT_MAX_ITERS, "Fixed-point sweeps per implicit step.")
    tol: float = _option(DEFAULT_IMPLICIT_TOL, "Implicit stopping tolerance on the sup-norm change.")
    implicit_fallback: bool = _option(
        True, "Switch a diverging implicit iteration to nonlinear Jacobi sweeps."
    )
    cfl_ratio_check: Optional[float] = _option(None, "Reject explicit runs whose tau/h exceeds this value.")
    strict_cfl: bool = _option(False, "Fail explicit runs that exceed the estimated CFL bound.")
    gradient_radius: Optional[float] = _option(
        None, "Difference bound R; derived from the initial data when unset."
    )

    # ----- data -----
    initial: str = _option(
        "squared_l2",
        """
        Initial data: squared_l2, min_cos, neg_min_cos, centered_squared_l2 or
        constant.
        """,
    )
    initial_value: float = _option(0.0, "Value of the constant initial data.")
    potential: str = _option("zero", "Potential F: zero or constant.")
    potential_value: float = _option(0.0, "Value of the constant potential.")

    # ----- studies and outputs -----
    resolutions: tuple[int, ...] = _option((16, 32, 64, 128), "Mesh resolutions N of convergence studies.")
    reference_levels: int = _option(
        512, "Resolution of the reference run; a multiple of every study resolution."
    )
    snapshot_times: tuple[float, ...] = _option((), "Times written by solve. Empty means 0 and T.")
    study_parameter: str = _option(
        "noise_intensity", "Parameter swept by study: noise_intensity, theta or coefficient."
    )
    study_values: tuple[str, ...] = _option((), "Values of the swept parameter.")
    output_dir: str = _option("out", "Directory for CSV tables and manifests.")
    seed: int = _option(0, "Seed of the sampled CFL and dissipation estimates.")

    def __post_init__(self) -> None:
        d = self.vertices
        _require(d >= 2, "vertices", d, "at least 2")
        _require(len(self.weights) in (0, d * d), "weights", self.weights, f"{d * d} values (a {d} x {d} matrix)")
        _require(0 <= self.eps < 1.0 / d, "eps", self.eps, f"in [0, 1/{d})")
        _require(self.final_time >= 0, "final_time", self.final_time, ">= 0")
        _require(
            (self.h is None) != (self.n_levels is None), "h / n_levels", (self.h, self.n_levels), "exactly one set"
        )
        _require(
            (self.tau is None) != (self.ratio is None), "tau / ratio", (self.tau, self.ratio), "exactly one set"
        )
        for key in ("h", "tau", "ratio", "cfl_ratio_check", "gradient_radius"):
            value = getattr(self, key)
            _require(value is None or value > 0, key, value, "positive")
        _require(self.n_levels is None or self.n_levels >= 1, "n_levels", self.n_levels, ">= 1")
        _require(self.kappa > 1, "kappa", self.kappa, "> 1")
        _require(self.noise_intensity >= 0, "noise_intensity", self.noise_intensity, ">= 0")
        _require(self.max_iters >= 1, "max_iters", self.max_iters, ">= 1")
        _require(self.tol > 0, "tol", self.tol, "positive")
        _require(all(g >= 0 for g in self.lf_gamma), "lf_gamma", self.lf_gamma, "nonnegative")
        _require(
            all(n >= 1 for n in self.resolutions)
            and all(a < b for a, b in zip(self.resolutions, self.resolutions[1:])),
            "resolutions",
            self.resolutions,
            "positive and strictly increasing",
        )
        _require(self.reference_levels >= 1, "reference_levels", self.reference_levels, ">= 1")
        _require(all(t >= 0 for t in self.snapshot_times), "snapshot_times", self.snapshot_times, ">= 0")

        _require_name("tensor", self.tensor, (*TENSORS, "convex_combination"))
        _require_name("hamiltonian", self.hamiltonian, tuple(k.value for k in HamiltonianKind))
        _require_name("coefficient", self.coefficient, COEFFICIENT_NAMES)
        _require_name("discrete_hamiltonian", self.discrete_hamiltonian, tuple(k.value for k in DiscreteKind))
        _require_name("boundary", self.boundary, tuple(m.value for m in BoundaryMode))
        _require_name("scheme", self.scheme, tuple(k.value for k in SchemeKind))
        _require_name("initial", self.initial, INITIAL_DATA_NAMES)
        _require_name("potential", self.potential, POTENTIAL_NAMES)
        _require_name("study_parameter", self.study_parameter, STUDY_PARAMETERS)

    def effective_items(self) -> dict[str, Any]:
        """Every parameter, defaults included, as JSON-friendly values."""
        return {f.name: _plain(getattr(self, f.name)) for f in fields(self)}

    def with_overrides(self, **items: Any) -> ExperimentConfig:
        """Replace fields; setting h or tau clears n_levels or ratio (and back)."""
        unknown = sorted(set(items) - set(field_types()))
        if unknown:
            raise UnknownConfigKeyError(
                f"Unknown configuration key(s): {', '.join(unknown)}.\n"
                f"Known keys: {', '.join(field_types())}."
            )
        for key, other in _EXCLUSIVE_KEYS.items():
            if key in items and other not in items and items[key] is not None:
                items[other] = None
        return replace(self, **items)

    def render(self) -> str:
        """The configuration as a ``key = value`` file."""
        return "".join(f"{key} = {_render(value)}\n" for key, value in self.effective_items().items())


def _require(condition: bool, key: str, value: Any, expectation: str) -> None:
    if not condition:
        raise ConfigValueError(f"Invalid value for {key}: {value!r} (expected {expectation}).")


def _require_name(key: str, value: str, known: tuple[str, ...]) -> None:
    if value not in known:
        raise ConfigValueError(f"Unknown {key} {value!r}. Known values: {', '.join(known)}.")


def _plain(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def _render(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ", ".join(_render(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def field_types() -> dict[str, Any]:
    """Resolved type hints of every ExperimentConfig field, in declaration order."""
    hints = typing.get_type_hints(ExperimentConfig)
    return {f.name: hints[f.name] for f in fields(ExperimentConfig)}


def coerce_value(key: str, text: str) -> Any:
    """Convert the text of one value to the type of field ``key``.

    Raises:
        UnknownConfigKeyError: If ``key`` is not a field.
        ConfigValueError: If the text does not parse as the field's type.
    """
    types = field_types()
    if key not in types:
        raise UnknownConfigKeyError(
            f"Unknown configuration key {key!r}.\nKnown keys: {', '.join(types)}."
        )
    try:
        return _coerce(types[key], text.strip())
    except ValueError as e:
        raise ConfigValueError(f"Cannot read {key} = {text.strip()!r}: {e}") from None


def _coerce(kind: Any, text: str) -> Any:
    origin = typing.get_origin(kind)
    if origin is Union:
        if text.lower() == "none":
            return None
        (inner,) = [arg for arg in typing.get_args(kind) if arg is not type(None)]
        return _coerce(inner, text)
    if origin is tuple:
        inner = typing.get_args(kind)[0]
        return tuple(_coerce(inner, part.strip()) for part in text.split(",") if part.strip())
    if kind is bool:
        if text.lower() in _TRUE:
            return True
        if text.lower() in _FALSE:
            return False
        raise ValueError("expected true or false")
    if kind is int:
        return int(text)
    if kind is float:
        value = float(text)
        if not math.isfinite(value):
            raise ValueError("expected a finite number")
        return value
    return text.strip("\"'")


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    """Parse a ``key = value`` configuration; omitted keys keep their defaults.

    Raises:
        UnknownConfigKeyError: On keys that are not ExperimentConfig fields.
        ConfigValueError: On malformed lines, repeated keys or invalid values.
    """
    items: dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigValueError(f"{source}:{number}: expected 'key = value', got {raw.strip()!r}.")
        if key in items:
            raise ConfigValueError(f"{source}:{number}: key {key!r} is given twice.")
        try:
            items[key] = coerce_value(key, value)
        except (UnknownConfigKeyError, ConfigValueError) as e:
            raise type(e)(f"{source}:{number}: {e}") from None
    logger.debug(f"Read {len(items)} keys from {source}")
    return ExperimentConfig().with_overrides(**items)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read a configuration file.

    Raises:
        ConfigValueError: If the file cannot be read.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigValueError(f"Cannot read configuration file {path}: {e}") from None
    return parse_config(text, source=str(path))
