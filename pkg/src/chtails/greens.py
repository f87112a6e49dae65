"""Green's kernel of ``1 - d^2/dx^2`` on a truncated line.

The kernel is ``G(x) = exp(-|x|) / 2`` so that ``(1 - d^2/dx^2) G = delta``.
Convolutions are split into the two one-sided integrals

    L(x) = int_{x_min}^{x} exp(-(x - y)) f(y) dy
    R(x) = int_{x}^{x_max} exp(-(y - x)) f(y) dy

and accumulated cell by cell with the recursion ``L[i+1] = exp(-dx) L[i] + cell``.
Only decaying exponentials are ever formed, so no weight can overflow however
far the domain extends.
"""

from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import solve_banded
from scipy.signal import lfilter

from .grid import Field, d2

__all__ = [
    "HALF_FACTOR",
    "kernel",
    "conv_G",
    "conv_dG",
    "helmholtz_solve",
    "apply_helmholtz",
    "one_sided_integrals",
]

HALF_FACTOR = 0.5
DEFAULT_ORDER = 4


def kernel(x):
    return HALF_FACTOR * np.exp(-np.abs(x))


@lru_cache(maxsize=64)
def _cell_weights(dx: float, order: int) -> tuple[NDArray[np.float64], ...]:
    """Weights for int_0^dx exp(-(dx - s)) p(s) ds, p interpolating f.

    Returns one weight row per stencil position: linear uses nodes {0, dx};
    cubic uses {-dx, 0, dx, 2dx} in the interior and shifted four-point
    stencils in the first and last cells.
    """
    gx, gw = np.polynomial.legendre.leggauss(16)
    s = 0.5 * dx * (gx + 1.0)
    w = 0.5 * dx * gw * np.exp(-(dx - s))
    if order == 2:
        nodes = [np.array([0.0, 1.0])]
    elif order == 4:
        nodes = [np.array([0.0, 1.0, 2.0, 3.0]),
                 np.array([-1.0, 0.0, 1.0, 2.0]),
                 np.array([-2.0, -1.0, 0.0, 1.0])]
    else:
        raise ValueError(f"order must be 2 or 4, got {order}")
    rows = []
    for nd in nodes:
        t = s / dx
        basis = []
        for k in range(nd.size):
            others = np.delete(nd, k)
            basis.append(np.prod([(t - o) / (nd[k] - o) for o in others], axis=0))
        rows.append(np.array([np.dot(w, b) for b in basis]))
    return tuple(rows)


def _left_cells(v: NDArray[np.float64], dx: float, order: int) -> NDArray[np.float64]:
    """c[j] = int over cell j of exp(-(x_{j+1} - y)) f(y) dy, j = 0..n-2."""
    rows = _cell_weights(dx, order)
    if order == 2:
        a = rows[0]
        return a[0] * v[:-1] + a[1] * v[1:]
    first, mid, last = rows
    n = v.size
    c = np.empty(n - 1)
    c[1:-1] = mid[0] * v[:-3] + mid[1] * v[1:-2] + mid[2] * v[2:-1] + mid[3] * v[3:]
    c[0] = first @ v[:4]
    c[-1] = last @ v[-4:]
    return c


def one_sided_integrals(values, dx: float, order: int = DEFAULT_ORDER):
    """Return ``(L, R)`` for sampled ``values`` on a uniform grid."""
    v = np.asarray(values, dtype=np.float64)
    if v.size < 4:
        raise ValueError("convolution needs at least 4 nodes")
    decay = np.exp(-dx)
    cl = _left_cells(v, dx, order)
    left = np.zeros_like(v)
    left[1:] = lfilter([1.0], [1.0, -decay], cl)
    # mirror: R of f equals L of the reversed samples, reversed
    cr = _left_cells(v[::-1], dx, order)
    right = np.zeros_like(v)
    right[1:] = lfilter([1.0], [1.0, -decay], cr)
    return left, right[::-1].copy()


def _check_finite(out, what):
    if not np.all(np.isfinite(out)):
        raise FloatingPointError(f"{what} produced non-finite values")
    return out


def conv_G_values(values, dx: float, order: int = DEFAULT_ORDER):
    left, right = one_sided_integrals(values, dx, order)
    return _check_finite(HALF_FACTOR * (left + right), "conv_G")


def conv_dG_values(values, dx: float, order: int = DEFAULT_ORDER):
    left, right = one_sided_integrals(values, dx, order)
    return _check_finite(HALF_FACTOR * (right - left), "conv_dG")


def conv_G(f: Field, order: int = DEFAULT_ORDER) -> Field:
    """``G * f`` evaluated at the grid nodes."""
    return Field(f.grid, conv_G_values(f.values, f.grid.dx, order), "G*" + f.role)


def conv_dG(f: Field, order: int = DEFAULT_ORDER) -> Field:
    """``(dG/dx) * f`` evaluated at the grid nodes."""
    return Field(f.grid, conv_dG_values(f.values, f.grid.dx, order), "∂xG*" + f.role)


@lru_cache(maxsize=16)
def _helmholtz_bands(n: int, dx: float) -> NDArray[np.float64]:
    inv = 1.0 / (dx * dx)
    ab = np.zeros((3, n))
    ab[0, 1:] = -inv
    ab[1, :] = 1.0 + 2.0 * inv
    ab[2, :-1] = -inv
    # Robin ends u' = +u (left), u' = -u (right) through a centered ghost node
    ab[1, 0] = ab[1, -1] = 1.0 + 2.0 * inv + 2.0 / dx
    ab[0, 1] = -2.0 * inv
    ab[2, -2] = -2.0 * inv
    ab.flags.writeable = False
    return ab


def helmholtz_solve(f: Field, tail_fraction: float = 1e-6) -> Field:
    """Solve ``(1 - d^2/dx^2) u = f`` with transparent Robin ends.

    Second-order centered differences; the Robin conditions ``u' = -u`` at
    ``x_max`` and ``u' = u`` at ``x_min`` are exact for the far field of a
    decaying right-hand side.
    """
    v = f.values
    n = v.size
    k = max(1, n // 100)
    vmax = np.max(np.abs(v))
    if vmax > 0 and max(np.max(np.abs(v[:k])), np.max(np.abs(v[-k:]))) > tail_fraction * vmax:
        warnings.warn(
            "helmholtz_solve: right-hand side does not decay toward the domain ends; "
            "transparent boundary conditions are inexact",
            RuntimeWarning,
            stacklevel=2,
        )
    ab = _helmholtz_bands(n, f.grid.dx)
    u = solve_banded((1, 1), ab, v, check_finite=False)
    assert np.all(np.isfinite(u)), "Helmholtz system is singular"
    return Field(f.grid, u, "(1-∂xx)⁻¹" + f.role)


def apply_helmholtz(u: Field) -> Field:
    """``h = u - u_xx`` with the 4th-order second-derivative stencil."""
    return Field(u.grid, u.values - d2(u.values, u.grid.dx), "(1-∂xx)" + u.role)
