"""Initial profiles used by the experiments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .greens import conv_G_values
from .grid import Field, Grid1D, sample

__all__ = ["KINDS", "InitialData", "bump", "mollifier"]

KINDS = ("compact_bump", "sech_tail", "peakon", "smoothed_peakon", "gaussian",
         "exp_tail", "custom")


def bump(x, center: float = 0.0, width: float = 1.0):
    """exp(1 - 1/(1 - s^2)) for |s| < 1 with s = (x - center)/width, else 0."""
    x = np.asarray(x, dtype=np.float64)
    s = (x - center) / width
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def mollifier(g: Grid1D, center: float, eps: float):
    """Sampled unit-mass bump of radius ``eps``; mass is exact under the trapezoid rule."""
    rho = bump(g.x, center, eps)
    mass = np.trapezoid(rho, dx=g.dx)
    if mass <= 0.0:
        raise ValueError(f"mollifier radius {eps} is not resolved by dx={g.dx}")
    return rho / mass


@dataclass(frozen=True)
class InitialData:
    """Parameters of one initial profile.

    ``compact_bump``  A exp(1 - 1/(1 - ((x-x0)/w)^2)) on |x - x0| < w
    ``sech_tail``     A / cosh(theta (x - x0)), tails 2A exp(-theta |x - x0|)
    ``peakon``        c exp(-|x - x0|)
    ``smoothed_peakon`` the peakon mollified over radius epsilon
    ``gaussian``      A exp(-((x - x0)/w)^2)
    ``exp_tail``      A exp(-|x - x0|) mollified over radius epsilon
    ``custom``        ``func(x)``
    """

    kind: str = "compact_bump"
    amplitude: float = 0.25
    center: float = 0.0
    width: float = 2.0
    theta: float = 0.5
    c: float = 1.0
    epsilon: float = 0.1
    func: Callable | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.width <= 0:
            raise ValueError(f"width must be positive, got {self.width}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must be in (0,1), got {self.theta}")
        if self.kind == "custom" and self.func is None:
            raise ValueError("custom initial data needs func")

    @property
    def support(self) -> tuple[float, float] | None:
        """Closed support interval, or None when the profile is not compact."""
        if self.kind == "compact_bump":
            return (self.center - self.width, self.center + self.width)
        return None

    def field(self, g: Grid1D) -> Field:
        k, A, x0 = self.kind, self.amplitude, self.center
        if k == "compact_bump":
            return Field(g, A * bump(g.x, x0, self.width), "u0")
        if k == "sech_tail":
            return sample(g, lambda x: A / np.cosh(self.theta * (x - x0)), "u0")
        if k == "peakon":
            return sample(g, lambda x: self.c * np.exp(-np.abs(x - x0)), "u0")
        if k == "gaussian":
            return sample(g, lambda x: A * np.exp(-(((x - x0) / self.width) ** 2)), "u0")
        if k in ("smoothed_peakon", "exp_tail"):
            if self.epsilon < 4 * g.dx:
                raise ValueError(
                    f"epsilon={self.epsilon} must be at least 4 dx = {4 * g.dx}"
                )
            scale = self.c if k == "smoothed_peakon" else A
            # G * (2 scale rho) = scale * (exp(-|.|) * rho)
            h = 2.0 * scale * mollifier(g, x0, self.epsilon)
            return Field(g, conv_G_values(h, g.dx), "u0")
        return sample(g, self.func, "u0")

    @property
    def is_zero(self) -> bool:
        if self.kind in ("peakon", "smoothed_peakon"):
            return self.c == 0.0
        if self.kind == "custom":
            return False
        return self.amplitude == 0.0
