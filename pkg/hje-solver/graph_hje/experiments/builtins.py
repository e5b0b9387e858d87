"""Named initial data for experiment configurations.

Every function maps an (..., d) array of simplex points to an (...) array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from graph_hje.exceptions import ConfigValueError
from graph_hje.scheme import InitialData


def squared_l2(xi: np.ndarray) -> np.ndarray:
    """||xi||^2."""
    return np.sum(np.asarray(xi, dtype=float) ** 2, axis=-1)


def min_cos(xi: np.ndarray) -> np.ndarray:
    """min_i xi_i * cos(||xi||^2); vanishes where a coordinate is zero."""
    xi = np.asarray(xi, dtype=float)
    return np.min(xi, axis=-1) * np.cos(np.sum(xi**2, axis=-1))


def neg_min_cos(xi: np.ndarray) -> np.ndarray:
    return -min_cos(xi)


def centered_squared_l2(xi: np.ndarray) -> np.ndarray:
    """||xi - 1/d||^2, the squared distance to the uniform distribution."""
    xi = np.asarray(xi, dtype=float)
    return np.sum((xi - 1.0 / xi.shape[-1]) ** 2, axis=-1)


@dataclass(frozen=True)
class ConstantInitial:
    value: float

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        return np.full(np.shape(xi)[:-1], float(self.value))


_INITIAL_DATA: dict[str, InitialData] = {
    "squared_l2": squared_l2,
    "min_cos": min_cos,
    "neg_min_cos": neg_min_cos,
    "centered_squared_l2": centered_squared_l2,
}

INITIAL_DATA_NAMES = (*_INITIAL_DATA, "constant")


def initial_by_name(name: str, *, value: float = 0.0) -> InitialData:
    if name == "constant":
        return ConstantInitial(value)
    try:
        return _INITIAL_DATA[name]
    except KeyError:
        raise ConfigValueError(
            f"Unknown initial data {name!r}. Known initial data: {', '.join(INITIAL_DATA_NAMES)}."
        ) from None
