"""Explicit time integration of the Camassa-Holm equation in nonlocal form.

    u_t + u u_x + (dG/dx) * (u^2 + u_x^2 / 2) = 0

The momentum transport form ``h_t + u h_x = -2 u_x h`` is integrated by
``evolve_momentum`` as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from numpy.typing import NDArray

from .diagnostics import F_values, H1, M0
from .greens import DEFAULT_ORDER, conv_dG_values, conv_G_values
from .grid import Field, d1, d2

__all__ = [
    "U_FLOOR",
    "DT_MIN",
    "BlowUpError",
    "TimeStepConfig",
    "SolverState",
    "Trajectory",
    "rhs",
    "rhs_values",
    "rhs_momentum",
    "choose_dt",
    "step_rk4",
    "evolve",
    "evolve_momentum",
    "integrate_fixed",
]

U_FLOOR = 1e-12
DT_MIN = 1e-12
TAIL_CLAMP = 1e-300

Monitor = Callable[["SolverState"], Mapping[str, float]]


class BlowUpError(RuntimeError):
    """Raised when a step produces non-finite values or the step size collapses.

    ``state`` is the last finite state reached.
    """

    def __init__(self, message: str, state: "SolverState"):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class TimeStepConfig:
    cfl: float = 0.25
    dt_max: float = 0.05
    t_end: float = 1.0
    monitor_stride: int = 1
    tail_clamp: bool = False

    def __post_init__(self):
        if not 0.0 < self.cfl <= 0.5:
            raise ValueError(f"cfl must be in (0, 0.5], got {self.cfl}")
        if not self.dt_max > 0.0:
            raise ValueError(f"dt_max must be positive, got {self.dt_max}")
        if not self.t_end > 0.0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if int(self.monitor_stride) != self.monitor_stride or self.monitor_stride < 1:
            raise ValueError(f"monitor_stride must be a positive integer, got {self.monitor_stride}")


@dataclass(frozen=True)
class SolverState:
    t: float
    u: Field
    step_count: int = 0
    baselines: Mapping[str, float] = field(default_factory=dict)


@dataclass
class Trajectory:
    """Monitor records plus the final state of one ``evolve`` call."""

    times: list[float]
    records: list[dict[str, float]]
    final: SolverState
    steps: int
    error: str | None = None
    snapshots: list[tuple[float, NDArray[np.float64], NDArray[np.float64]]] = field(
        default_factory=list
    )

    @property
    def partial(self) -> bool:
        return self.error is not None

    def series(self, name: str) -> NDArray[np.float64]:
        return np.array([r.get(name, np.nan) for r in self.records], dtype=np.float64)


def rhs_values(u: NDArray[np.float64], dx: float, order: int = DEFAULT_ORDER):
    ux = d1(u, dx)
    F = u * u + 0.5 * ux * ux
    return -u * ux - conv_dG_values(F, dx, order)


def rhs(u: Field) -> Field:
    """Time derivative of ``u`` under the nonlocal equation."""
    return Field(u.grid, rhs_values(u.values, u.grid.dx), "∂t " + u.role)


def rhs_momentum(h: Field, u: Field) -> Field:
    """-u h_x - 2 u_x h."""
    if h.grid != u.grid:
        raise ValueError("h and u must live on the same grid")
    dx = u.grid.dx
    return Field(u.grid, -u.values * d1(h.values, dx) - 2.0 * d1(u.values, dx) * h.values,
                 "∂t " + h.role)


def choose_dt(u: NDArray[np.float64], dx: float, cfg: TimeStepConfig) -> float:
    umax = max(float(np.max(np.abs(u))), U_FLOOR)
    return min(cfg.dt_max, cfg.cfl * dx / umax)


def _rk4(y, dt, f):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_rk4(s: SolverState, cfg: TimeStepConfig, dt: float | None = None,
             order: int = DEFAULT_ORDER) -> SolverState:
    """One classical RK4 step; ``dt`` defaults to the CFL choice."""
    g = s.u.grid
    if dt is None:
        dt = choose_dt(s.u.values, g.dx, cfg)
    if not dt >= DT_MIN:
        raise BlowUpError(f"blow-up or instability detected: dt={dt:.3e} underflow at t={s.t}", s)
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            unew = _rk4(s.u.values, dt, lambda v: rhs_values(v, g.dx, order))
        except FloatingPointError:
            unew = None
    if unew is None or not np.all(np.isfinite(unew)):
        raise BlowUpError(f"blow-up or instability detected at t={s.t}", s)
    if cfg.tail_clamp:
        unew[np.abs(unew) < TAIL_CLAMP] = 0.0
    return SolverState(s.t + dt, Field(g, unew, s.u.role), s.step_count + 1, s.baselines)


def _record(state: SolverState, monitors: Sequence[Monitor]) -> dict[str, float]:
    rec: dict[str, float] = {}
    for m in monitors:
        rec.update(m(state))
    return rec


def evolve(u0: Field, cfg: TimeStepConfig, monitors: Iterable[Monitor] = (),
           output_times: Iterable[float] = (), keep_snapshots: bool = False,
           order: int = DEFAULT_ORDER) -> Trajectory:
    """Advance ``u0`` to ``cfg.t_end``, recording monitors along the way.

    Monitors run at t=0, every ``monitor_stride`` steps, at each requested
    output time (steps are shortened to land on them) and at ``t_end``.
    A blow-up ends the run early; the trajectory is then marked partial.
    With ``keep_snapshots`` the state and its time derivative are stored at
    every recorded time, which is what the flow-map integration consumes.
    """
    monitors = list(monitors)
    g = u0.grid
    stops = sorted({float(t) for t in output_times if 0.0 < t < cfg.t_end} | {cfg.t_end})
    state = SolverState(0.0, u0, 0, {"H1": H1(u0), "M0": M0(u0)})
    traj = Trajectory([], [], state, 0)

    def record(st):
        traj.times.append(st.t)
        traj.records.append(_record(st, monitors))
        if keep_snapshots:
            traj.snapshots.append((st.t, st.u.values, rhs_values(st.u.values, g.dx, order)))

    record(state)
    stop_i = 0
    while stop_i < len(stops):
        target = stops[stop_i]
        dt = choose_dt(state.u.values, g.dx, cfg)
        landing = state.t + dt >= target - 1e-12 * max(1.0, target)
        if landing:
            dt = target - state.t
        try:
            state = step_rk4(state, cfg, dt, order)
        except BlowUpError as exc:
            traj.error = str(exc)
            traj.final = exc.state
            traj.steps = exc.state.step_count
            return traj
        if landing:
            state = SolverState(target, state.u, state.step_count, state.baselines)
            stop_i += 1
        if landing or state.step_count % cfg.monitor_stride == 0:
            record(state)
    traj.final = state
    traj.steps = state.step_count
    return traj


def evolve_momentum(h0: Field, cfg: TimeStepConfig, order: int = DEFAULT_ORDER):
    """Advance the momentum ``h`` by transport, rebuilding ``u = G * h`` each stage.

    Returns ``(t, h, u)`` at ``cfg.t_end``.
    """
    g = h0.grid
    dx = g.dx

    def f(h):
        u = conv_G_values(h, dx, order)
        return -u * d1(h, dx) - 2.0 * d1(u, dx) * h

    h = h0.values.copy()
    t = 0.0
    while t < cfg.t_end:
        u = conv_G_values(h, dx, order)
        dt = min(choose_dt(u, dx, cfg), cfg.t_end - t)
        h = _rk4(h, dt, f)
        if not np.all(np.isfinite(h)):
            raise BlowUpError(f"blow-up or instability detected at t={t}",
                              SolverState(t, Field(g, u), 0))
        t = t + dt if t + dt < cfg.t_end - 1e-14 else cfg.t_end
    u = conv_G_values(h, dx, order)
    return t, Field(g, h, "h"), Field(g, u, "u")


def integrate_fixed(u0: Field, dt: float, nsteps: int, order: int = DEFAULT_ORDER) -> Field:
    """``nsteps`` RK4 steps of fixed size; used by refinement studies."""
    dx = u0.grid.dx
    v = u0.values.copy()
    for _ in range(nsteps):
        v = _rk4(v, dt, lambda w: rhs_values(w, dx, order))
    if not np.all(np.isfinite(v)):
        raise FloatingPointError("fixed-step integration produced non-finite values")
    return Field(u0.grid, v, u0.role)


