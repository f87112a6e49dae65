"""Uniform 1D grid, sampled fields, finite differences and quadrature."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "Grid1D",
    "Field",
    "sample",
    "derivative",
    "second_derivative",
    "integrate",
    "tail_window",
    "d1",
    "d2",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with ``n`` nodes on ``[x_min, x_max]``."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min ({self.x_min}) must be < x_max ({self.x_max})")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> NDArray[np.float64]:
        x = self.x_min + np.arange(self.n) * self.dx
        x.flags.writeable = False
        return x

    def node(self, i: int) -> float:
        if not 0 <= i < self.n:
            raise IndexError(f"node index {i} outside [0, {self.n - 1}]")
        return self.x_min + i * self.dx

    def index_of(self, x: float) -> int:
        """Index of the node nearest to ``x`` (clipped to the grid)."""
        i = int(round((x - self.x_min) / self.dx))
        return min(max(i, 0), self.n - 1)


@dataclass(frozen=True)
class Field:
    """Samples of one real function on a grid. Values are read-only."""

    grid: Grid1D
    values: NDArray[np.float64]
    role: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.shape != (self.grid.n,):
            raise ValueError(
                f"field '{self.role}' has shape {v.shape}, grid needs ({self.grid.n},)"
            )
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v))[0])
            raise ValueError(
                f"field '{self.role}' is not finite at node {bad} (x={self.grid.node(bad)})"
            )
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> NDArray[np.float64]:
        return self.grid.x

    def with_values(self, values, role: str | None = None) -> "Field":
        return Field(self.grid, values, self.role if role is None else role)

    def __len__(self) -> int:
        return self.grid.n


def sample(g: Grid1D, f: Callable[[NDArray[np.float64]], NDArray[np.float64]],
           role: str = "") -> Field:
    """Evaluate ``f`` at every node. ``f`` must accept a numpy array."""
    x = g.x
    with np.errstate(all="ignore"):
        values = np.broadcast_to(np.asarray(f(x), dtype=np.float64), x.shape)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"f is not finite at node {i} (x={g.node(i)!r})")
    return Field(g, values, role)


# 4th-order stencils; one-sided rows for the two nodes nearest each boundary.
_D1_LEFT = np.array([
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
]) / 12.0
_D2_LEFT = np.array([
    [45.0, -154.0, 214.0, -156.0, 61.0, -10.0],
    [10.0, -15.0, -4.0, 14.0, -6.0, 1.0],
]) / 12.0


def d1(v: NDArray[np.float64], dx: float) -> NDArray[np.float64]:
    """First derivative of uniformly spaced samples, 4th order everywhere."""
    n = v.shape[-1]
    if n < 8:
        raise ValueError(f"derivative needs at least 8 nodes, got {n}")
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / 12.0
    out[0] = _D1_LEFT[0] @ v[:5]
    out[1] = _D1_LEFT[1] @ v[:5]
    out[-1] = -(_D1_LEFT[0] @ v[-1:-6:-1])
    out[-2] = -(_D1_LEFT[1] @ v[-1:-6:-1])
    return out / dx


def d2(v: NDArray[np.float64], dx: float) -> NDArray[np.float64]:
    """Second derivative of uniformly spaced samples, 4th order everywhere."""
    n = v.shape[-1]
    if n < 8:
        raise ValueError(f"derivative needs at least 8 nodes, got {n}")
    out = np.empty_like(v)
    out[2:-2] = (-v[:-4] + 16.0 * v[1:-3] - 30.0 * v[2:-2] + 16.0 * v[3:-1] - v[4:]) / 12.0
    out[0] = _D2_LEFT[0] @ v[:6]
    out[1] = _D2_LEFT[1] @ v[:6]
    out[-1] = _D2_LEFT[0] @ v[-1:-7:-1]
    out[-2] = _D2_LEFT[1] @ v[-1:-7:-1]
    return out / (dx * dx)


def derivative(f: Field) -> Field:
    return Field(f.grid, d1(f.values, f.grid.dx), "∂x " + f.role)


def second_derivative(f: Field) -> Field:
    return Field(f.grid, d2(f.values, f.grid.dx), "∂xx " + f.role)


def integrate(f: Field) -> float:
    """Composite trapezoid rule over all nodes."""
    return float(np.trapezoid(f.values, dx=f.grid.dx))


def tail_window(g: Grid1D, side: str, margin: float, width: float) -> range:
    """Node indices covering ``[x_max - margin - width, x_max - margin]``.

    The left window is the mirror image, ``[x_min + margin, x_min + margin + width]``.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if margin < 0 or width <= 0:
        raise ValueError("margin must be >= 0 and width > 0")
    if margin + width >= (g.x_max - g.x_min) / 2:
        raise ValueError(
            f"tail window margin+width={margin + width} exceeds half the domain "
            f"({(g.x_max - g.x_min) / 2})"
        )
    if side == "right":
        lo, hi = g.x_max - margin - width, g.x_max - margin
    else:
        lo, hi = g.x_min + margin, g.x_min + margin + width
    # small slack so nodes sitting on the window edges are kept
    eps = 1e-9 * g.dx
    i0 = int(np.ceil((lo - g.x_min) / g.dx - eps))
    i1 = int(np.floor((hi - g.x_min) / g.dx + eps))
    if i1 < i0:
        raise ValueError(f"tail window [{lo}, {hi}] contains no nodes")
    return range(i0, i1 + 1)
