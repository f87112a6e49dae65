"""Diagnostics for decay, tail coefficients and momentum support.

Every exponentially weighted integral is accumulated with the exponent
shifted by its largest value over the nonzero samples, so ``exp(y) h(y)``
never overflows and the near-cancellation in ``E+(0)`` is preserved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .greens import HALF_FACTOR, conv_G_values
from .grid import Field, Grid1D, d1, d2

__all__ = [
    "VALUE_FLOOR",
    "MIN_FIT_NODES",
    "WeightProfile",
    "TailFit",
    "TailCoefficients",
    "Plateau",
    "F_field",
    "F_values",
    "exp_weighted_integral",
    "weighted_sup",
    "weighted_norm_sum",
    "fit_tail",
    "tail_coefficients",
    "check_E_plus_zero_initial",
    "momentum_support",
    "c_plus_estimate",
    "c_minus_estimate",
    "H1",
    "M0",
    "kernel_weight_bound",
]

VALUE_FLOOR = 1e-13
MIN_FIT_NODES = 8


@dataclass(frozen=True)
class WeightProfile:
    """Truncated exponential weight: 1 on x <= 0, exp(theta x) up to N, flat after."""

    theta: float
    N: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must be in (0,1), got {self.theta}")
        if self.N <= 0:
            raise ValueError(f"N must be positive, got {self.N}")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.exp(self.theta * np.clip(x, 0.0, self.N))

    def derivative(self, x):
        x = np.asarray(x, dtype=np.float64)
        inside = (x > 0.0) & (x < self.N)
        return np.where(inside, self.theta * self(x), 0.0)


@dataclass(frozen=True)
class TailFit:
    slope: float
    log_prefactor: float
    r2: float
    window: range
    n_used: int
    floor_hit: bool

    @property
    def below_floor(self) -> bool:
        """Too few resolvable nodes: the tail is smaller than the floor."""
        return self.n_used < MIN_FIT_NODES


@dataclass(frozen=True)
class TailCoefficients:
    E_plus: float
    E_minus: float
    dE_plus_dt_pred: float
    dE_minus_dt_pred: float
    t: float


@dataclass(frozen=True)
class Plateau:
    """Mean of exp(+-x) u over a tail window and its spread."""

    value: float
    max_dev: float
    n_used: int

    @property
    def below_floor(self) -> bool:
        return self.n_used < MIN_FIT_NODES


def F_values(u: NDArray[np.float64], dx: float) -> NDArray[np.float64]:
    ux = d1(u, dx)
    return u * u + 0.5 * ux * ux


def F_field(u: Field) -> Field:
    """u^2 + (u_x)^2 / 2."""
    return Field(u.grid, F_values(u.values, u.grid.dx), "F(" + u.role + ")")


def exp_weighted_integral(values, x, sign: int = 1, dx: float | None = None) -> float:
    """Trapezoid value of int exp(sign*y) f(y) dy with a shifted exponent."""
    v = np.asarray(values, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    nz = v != 0.0
    if not np.any(nz):
        return 0.0
    expo = sign * x
    shift = float(np.max(expo[nz]))
    if dx is None:
        dx = float(x[1] - x[0])
    return float(np.exp(shift) * np.trapezoid(v * np.exp(expo - shift), dx=dx))


def weighted_sup(u: Field, w: WeightProfile) -> float:
    """max_x |u(x)| phi_N(x)."""
    return float(np.max(np.abs(u.values) * w(u.grid.x)))


def weighted_norm_sum(u: Field, w: WeightProfile, side: str = "right") -> tuple[float, float]:
    """(||u phi_N||_inf, ||u_x phi_N||_inf); ``side="left"`` uses phi_N(-x)."""
    x = u.grid.x
    phi = w(x) if side == "right" else w(-x)
    ux = d1(u.values, u.grid.dx)
    return float(np.max(np.abs(u.values) * phi)), float(np.max(np.abs(ux) * phi))


def fit_tail(u: Field, window: range, value_floor: float = VALUE_FLOOR) -> TailFit:
    """Least-squares line through (x, log|u|) over the resolvable window nodes.

    Nodes with ``|u| <= value_floor * max|u|`` are dropped; with fewer than
    eight left the fit is reported as below floor (slope and r2 are NaN).
    """
    v = u.values
    idx = np.arange(window.start, window.stop)
    vmax = float(np.max(np.abs(v)))
    vals = np.abs(v[idx])
    usable = vals > value_floor * vmax if vmax > 0 else np.zeros(idx.size, bool)
    n_used = int(np.count_nonzero(usable))
    floor_hit = n_used < idx.size
    if n_used < MIN_FIT_NODES:
        return TailFit(np.nan, np.nan, np.nan, window, n_used, floor_hit)
    xs = u.grid.x[idx][usable]
    ys = np.log(vals[usable])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return TailFit(float(slope), float(intercept), r2, window, n_used, floor_hit)


def tail_coefficients(h: Field, t: float, u: Field | None = None) -> TailCoefficients:
    """E+- = (1/2) int exp(+-y) h dy and their predicted time derivatives.

    ``u`` defaults to ``G * h``; pass the evolved field to avoid the extra
    convolution.
    """
    g = h.grid
    x = g.x
    uv = conv_G_values(h.values, g.dx) if u is None else u.values
    F = F_values(uv, g.dx)
    return TailCoefficients(
        E_plus=HALF_FACTOR * exp_weighted_integral(h.values, x, +1, g.dx),
        E_minus=HALF_FACTOR * exp_weighted_integral(h.values, x, -1, g.dx),
        dE_plus_dt_pred=HALF_FACTOR * exp_weighted_integral(F, x, +1, g.dx),
        dE_minus_dt_pred=-HALF_FACTOR * exp_weighted_integral(F, x, -1, g.dx),
        t=float(t),
    )


def check_E_plus_zero_initial(u0: Field) -> float:
    """E+ of the initial momentum ``u0 - u0''``; vanishes for compact data."""
    g = u0.grid
    h0 = u0.values - d2(u0.values, g.dx)
    return HALF_FACTOR * exp_weighted_integral(h0, g.x, +1, g.dx)


def momentum_support(h: Field, threshold_rel: float = 1e-8):
    """Outermost node positions where |h| exceeds ``threshold_rel * max|h|``.

    Returns ``None`` when no node qualifies (including h == 0).
    """
    if not 0.0 < threshold_rel < 1.0:
        raise ValueError(f"threshold_rel must be in (0,1), got {threshold_rel}")
    a = np.abs(h.values)
    m = float(np.max(a))
    if m == 0.0:
        return None
    idx = np.flatnonzero(a > threshold_rel * m)
    x = h.grid.x
    return float(x[idx[0]]), float(x[idx[-1]])


def _plateau(u: Field, window: range, sign: int, value_floor: float) -> Plateau:
    v = u.values
    idx = np.arange(window.start, window.stop)
    vmax = float(np.max(np.abs(v)))
    usable = np.abs(v[idx]) > value_floor * vmax if vmax > 0 else np.zeros(idx.size, bool)
    n_used = int(np.count_nonzero(usable))
    if n_used < MIN_FIT_NODES:
        return Plateau(np.nan, np.nan, n_used)
    xs = u.grid.x[idx][usable]
    scaled = v[idx][usable] * np.exp(sign * xs)
    mean = float(np.mean(scaled))
    return Plateau(mean, float(np.max(np.abs(scaled - mean))), n_used)


def c_plus_estimate(u: Field, window: range, value_floor: float = VALUE_FLOOR) -> Plateau:
    """Plateau of exp(x) u(x) over a right-tail window."""
    return _plateau(u, window, +1, value_floor)


def c_minus_estimate(u: Field, window: range, value_floor: float = VALUE_FLOOR) -> Plateau:
    """Plateau of exp(-x) u(x) over a left-tail window."""
    return _plateau(u, window, -1, value_floor)


def H1(u: Field) -> float:
    ux = d1(u.values, u.grid.dx)
    return float(np.trapezoid(u.values**2 + ux**2, dx=u.grid.dx))


def M0(u: Field) -> float:
    h = u.values - d2(u.values, u.grid.dx)
    return float(np.trapezoid(h, dx=u.grid.dx))


def kernel_weight_bound(g: Grid1D, w: WeightProfile) -> float:
    """max_x phi_N(x) int exp(-|x-y|) / phi_N(y) dy over the grid nodes.

    Truncation only drops positive contributions near the domain ends, so the
    maximum (reached on (0, N)) is accurate once the domain extends 20 units
    past both 0 and N.
    """
    if g.x_min > -20.0 or g.x_max < w.N + 20.0:
        raise ValueError(f"domain must contain [-20, N+20] = [-20, {w.N + 20}]")
    phi = w(g.x)
    vals = phi * conv_G_values(1.0 / phi, g.dx) / HALF_FACTOR
    return float(np.max(vals))
