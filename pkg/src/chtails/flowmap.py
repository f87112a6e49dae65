"""Lagrangian flow map of u and the momentum conservation law along it.

The flow ``d eta/dt = u(eta, t)`` and its Jacobian ``d J/dt = u_x(eta, t) J``
are integrated after the fact from stored solver snapshots. Velocities are
interpolated with 4-point cubic Lagrange polynomials in space and cubic
Hermite polynomials in time (the snapshots carry u_t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .grid import Field, Grid1D, d1

__all__ = [
    "FlowDegeneratedError",
    "FlowState",
    "VelocityRecord",
    "ConservationResidual",
    "interp_cubic",
    "seed_labels",
    "initial_flow",
    "advance_flow",
    "track_flow",
    "check_momentum_conservation",
    "support_endpoints",
]


class FlowDegeneratedError(RuntimeError):
    """A Jacobian reached zero: the flow stopped being a diffeomorphism."""


@dataclass(frozen=True)
class FlowState:
    labels: NDArray[np.float64]
    eta: NDArray[np.float64]
    jac: NDArray[np.float64]
    t: float
    escaped: NDArray[np.bool_]

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.eta) > 0.0))


@dataclass(frozen=True)
class ConservationResidual:
    max_abs: float
    rms: float
    n_particles: int


def interp_cubic(g: Grid1D, values: NDArray[np.float64], pos) -> NDArray[np.float64]:
    """Local 4-point cubic Lagrange interpolation of nodal values."""
    pos = np.asarray(pos, dtype=np.float64)
    r = (pos - g.x_min) / g.dx
    i = np.clip(np.floor(r).astype(np.int64), 1, g.n - 3)
    s = r - i
    sm1, sp1, sm2 = s + 1.0, s - 1.0, s - 2.0
    return (-s * sp1 * sm2 / 6.0 * values[i - 1]
            + sm1 * sp1 * sm2 / 2.0 * values[i]
            - sm1 * s * sm2 / 2.0 * values[i + 1]
            + sm1 * s * sp1 / 6.0 * values[i + 2])


class VelocityRecord:
    """Time-interpolable velocity built from solver snapshots.

    ``ut`` holds u_t at each snapshot; without it time interpolation falls
    back to linear.
    """

    def __init__(self, grid: Grid1D, times, u, ut=None):
        self.grid = grid
        self.times = np.asarray(times, dtype=np.float64)
        if self.times.ndim != 1 or self.times.size < 1 or np.any(np.diff(self.times) <= 0):
            raise ValueError("snapshot times must be strictly increasing")
        self.u = np.asarray(u, dtype=np.float64)
        self.ux = np.array([d1(v, grid.dx) for v in self.u])
        if ut is None:
            self.ut = self.uxt = None
        else:
            self.ut = np.asarray(ut, dtype=np.float64)
            self.uxt = np.array([d1(v, grid.dx) for v in self.ut])

    @classmethod
    def from_trajectory(cls, traj) -> "VelocityRecord":
        if not traj.snapshots:
            raise ValueError("trajectory has no snapshots; evolve with keep_snapshots=True")
        t, u, ut = zip(*traj.snapshots)
        return cls(traj.final.u.grid, t, np.array(u), np.array(ut))

    def fields_at(self, t: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        ts = self.times
        if t < ts[0] - 1e-12 or t > ts[-1] + 1e-12:
            raise ValueError(f"time {t} outside the record [{ts[0]}, {ts[-1]}]")
        if ts.size == 1:
            return self.u[0], self.ux[0]
        k = int(np.clip(np.searchsorted(ts, t, side="right") - 1, 0, ts.size - 2))
        tau = ts[k + 1] - ts[k]
        s = (t - ts[k]) / tau
        if self.ut is None:
            return ((1 - s) * self.u[k] + s * self.u[k + 1],
                    (1 - s) * self.ux[k] + s * self.ux[k + 1])
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2 * tau
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1) * tau
        u = h00 * self.u[k] + h10 * self.ut[k] + h01 * self.u[k + 1] + h11 * self.ut[k + 1]
        ux = h00 * self.ux[k] + h10 * self.uxt[k] + h01 * self.ux[k + 1] + h11 * self.uxt[k + 1]
        return u, ux

    def velocity(self, t: float, pos) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        u, ux = self.fields_at(t)
        return interp_cubic(self.grid, u, pos), interp_cubic(self.grid, ux, pos)


def seed_labels(g: Grid1D, extra=()) -> NDArray[np.float64]:
    """Every grid node plus the given positions, sorted and de-duplicated."""
    labels = np.concatenate([g.x, np.asarray(extra, dtype=np.float64)])
    labels = np.unique(labels)
    return labels[(labels >= g.x_min) & (labels <= g.x_max)]


def initial_flow(labels, t: float = 0.0) -> FlowState:
    labels = np.asarray(labels, dtype=np.float64)
    return FlowState(labels, labels.copy(), np.ones_like(labels), float(t),
                     np.zeros(labels.shape, dtype=bool))


def advance_flow(fs: FlowState, record: VelocityRecord, t_new: float) -> FlowState:
    """One RK4 step of (eta, J) from ``fs.t`` to ``t_new``."""
    g = record.grid
    dt = t_new - fs.t
    live = ~fs.escaped
    y0 = np.stack([fs.eta[live], fs.jac[live]])

    def f(t, y):
        u, ux = record.velocity(t, y[0])
        return np.stack([u, ux * y[1]])

    k1 = f(fs.t, y0)
    k2 = f(fs.t + 0.5 * dt, y0 + 0.5 * dt * k1)
    k3 = f(fs.t + 0.5 * dt, y0 + 0.5 * dt * k2)
    k4 = f(t_new, y0 + dt * k3)
    y = y0 + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    eta = fs.eta.copy()
    jac = fs.jac.copy()
    eta[live], jac[live] = y[0], y[1]
    if np.any(jac[live] <= 0.0):
        raise FlowDegeneratedError(f"flow degenerated (Jacobian <= 0) at t={t_new}")
    escaped = fs.escaped | (eta < g.x_min) | (eta > g.x_max)
    return FlowState(fs.labels, eta, jac, float(t_new), escaped)


def track_flow(record: VelocityRecord, labels) -> list[FlowState]:
    """Flow states at every snapshot time, one RK4 step per snapshot interval."""
    states = [initial_flow(labels, record.times[0])]
    for t in record.times[1:]:
        states.append(advance_flow(states[-1], record, float(t)))
    return states


def check_momentum_conservation(fs: FlowState, h_now: Field, h0: Field,
                                rel_cut: float = 1e-10) -> ConservationResidual:
    """Residual of h(eta, t) J^2 - h0 over particles carrying momentum."""
    if h_now.grid != h0.grid:
        raise ValueError("h_now and h0 must share a grid")
    g = h0.grid
    h0_lab = interp_cubic(g, h0.values, fs.labels)
    keep = (np.abs(h0_lab) > rel_cut * np.max(np.abs(h0.values))) & ~fs.escaped
    if not np.any(keep):
        return ConservationResidual(0.0, 0.0, 0)
    r = interp_cubic(g, h_now.values, fs.eta[keep]) * fs.jac[keep] ** 2 - h0_lab[keep]
    return ConservationResidual(float(np.max(np.abs(r))), float(np.sqrt(np.mean(r * r))),
                                int(np.count_nonzero(keep)))


def support_endpoints(fs: FlowState, a: float, b: float) -> tuple[float, float]:
    """Current images (eta(a,t), eta(b,t)) of two tracked labels."""
    out = []
    for p in (a, b):
        hit = np.flatnonzero(fs.labels == p)
        if hit.size == 0:
            raise ValueError(f"label {p} is not tracked by this flow")
        out.append(float(fs.eta[hit[0]]))
    return out[0], out[1]
