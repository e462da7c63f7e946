"""Shared domain types, grid construction and discrete derivative operators.

The volatility field v(x, t) lives on a uniform 1D mesh. Every discrete
operator in the package (first and third x-derivatives, the PDE right-hand
side, the zero-curvature residuals) is built on top of the periodic
4th-order central stencils defined here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or left its validity domain."""


@dataclass(frozen=True)
class SolitonParams:
    """Travelling-frame speed and asymptotic background level.

    ``lambda_speed`` is the speed of the moving frame xi = x - lambda*t,
    ``v0`` the constant value the field approaches far from the excitation.
    Soliton existence (0 < lambda_speed < v0**3) is deliberately *not*
    enforced here; it is checked by ``pseudopotential.existence_check``.
    """

    lambda_speed: float
    v0: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lambda_speed) and math.isfinite(self.v0)):
            raise ValueError("soliton parameters must be finite")
        if self.v0 <= 0.0:
            raise ValueError(f"background v0 must be positive, got {self.v0}")


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D mesh.

    Periodic grids identify x_max with x_min and therefore exclude the right
    endpoint: node i sits at x_min + i*dx with dx = (x_max - x_min)/n.
    Non-periodic grids include both endpoints, dx = (x_max - x_min)/(n - 1).
    """

    x_min: float
    x_max: float
    n: int
    periodic: bool = True

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if self.x_max <= self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.n < 8:
            raise ValueError(f"need at least 8 nodes, got {self.n}")

    @property
    def dx(self) -> float:
        cells = self.n if self.periodic else self.n - 1
        return (self.x_max - self.x_min) / cells

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)


def make_grid(x_min: float, x_max: float, n: int, periodic: bool = True) -> Grid1D:
    """Build a uniform grid; rejects non-finite bounds, n < 8, x_max <= x_min."""
    return Grid1D(float(x_min), float(x_max), int(n), bool(periodic))


@dataclass(frozen=True)
class Field:
    """Samples of v(x) on a grid at one instant. Immutable once constructed."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).copy()
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"values shape {values.shape} does not match grid with n={self.grid.n}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered sequence of fields on one shared grid."""

    times: np.ndarray
    frames: tuple[Field, ...] = dc_field(repr=False)

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float).copy()
        frames = tuple(self.frames)
        if times.ndim != 1 or len(frames) != times.size:
            raise ValueError("one frame is required per timestamp")
        if times.size == 0:
            raise ValueError("trajectory must contain at least one frame")
        if times.size > 1 and not np.all(np.diff(times) > 0.0):
            raise ValueError("times must be strictly increasing")
        grid = frames[0].grid
        if any(f.grid != grid for f in frames[1:]):
            raise ValueError("all frames must share one grid")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "frames", frames)

    @property
    def grid(self) -> Grid1D:
        return self.frames[0].grid

    @property
    def values(self) -> np.ndarray:
        """Frame values stacked into a (n_times, n_nodes) array."""
        return np.stack([f.values for f in self.frames])


def _pad_periodic(values: np.ndarray, k: int) -> np.ndarray:
    return np.concatenate(
        (values[..., -k:], values, values[..., :k]), axis=-1
    )


def d1_periodic(values: np.ndarray, dx: float) -> np.ndarray:
    """4th-order central first derivative with periodic wraparound (last axis)."""
    n = values.shape[-1]
    p = _pad_periodic(values, 2)
    return (
        p[..., 0:n] - 8.0 * p[..., 1 : n + 1] + 8.0 * p[..., 3 : n + 3] - p[..., 4 : n + 4]
    ) / (12.0 * dx)


def d3_periodic(values: np.ndarray, dx: float) -> np.ndarray:
    """4th-order central third derivative with periodic wraparound (last axis)."""
    n = values.shape[-1]
    p = _pad_periodic(values, 3)
    return (
        p[..., 0:n]
        - 8.0 * p[..., 1 : n + 1]
        + 13.0 * p[..., 2 : n + 2]
        - 13.0 * p[..., 4 : n + 4]
        + 8.0 * p[..., 5 : n + 5]
        - p[..., 6 : n + 6]
    ) / (8.0 * dx**3)


def derivative(field: Field, order: int) -> Field:
    """4th-order accurate spatial derivative of order 1 or 3.

    Only periodic grids are supported; the wraparound stencil is exact for
    fields whose tails have relaxed to a constant before the boundary.
    """
    if order not in (1, 3):
        raise ValueError(f"derivative order must be 1 or 3, got {order}")
    if not field.grid.periodic:
        raise ValueError("derivatives are only supported on periodic grids")
    op = d1_periodic if order == 1 else d3_periodic
    return Field(field.grid, op(field.values, field.grid.dx))
