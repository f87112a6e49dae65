"""Refinement studies and operator checks.

Each study returns an ``ExperimentReport`` whose verdicts carry acceptance
ids like the experiments do; ``run_convergence`` bundles all of them.
"""

from __future__ import annotations

import math

import numpy as np

from .config import RunConfig
from .diagnostics import H1, M0, WeightProfile, kernel_weight_bound
from .dynamics import TimeStepConfig, evolve, integrate_fixed
from .flowmap import VelocityRecord, check_momentum_conservation, seed_labels, track_flow
from .greens import apply_helmholtz, conv_G
from .grid import Grid1D, sample
from .initial_data import InitialData
from .scenarios import ExperimentReport

__all__ = [
    "observed_orders",
    "operator_identity_check",
    "temporal_order_study",
    "spatial_order_study",
    "conservation_check",
    "flow_conservation_study",
    "kernel_bound_study",
    "run_convergence",
]

KERNEL_THETAS = (0.25, 0.5, 0.75, 0.9)
KERNEL_NS = (8, 16, 32)


def observed_orders(errors, ratio: float = 2.0) -> list[float]:
    """log_ratio(e_k / e_{k+1}) for successive refinement levels."""
    e = np.asarray(errors, dtype=np.float64)
    return [float(np.log(e[i] / e[i + 1]) / np.log(ratio)) for i in range(e.size - 1)]


def _gauss(amplitude=0.25):
    return lambda x: amplitude * np.exp(-x * x)


def operator_identity_check(cfg: RunConfig) -> ExperimentReport:
    """(1 - d^2/dx^2)(G * f) = f, and G * exp(-|x|) against its closed form."""
    g = cfg.grid
    tol = cfg.tolerances.operator_rel_tol
    rep = ExperimentReport("operator_identity", {"grid": cfg.to_dict()["grid"]})
    profiles = {
        "mollified_exp": InitialData("exp_tail", amplitude=1.0, epsilon=0.1).field(g),
        "gaussian": sample(g, lambda x: np.exp(-x * x)),
        "compact_bump": InitialData("compact_bump", amplitude=1.0, width=2.0).field(g),
    }
    for name, f in profiles.items():
        back = apply_helmholtz(conv_G(f))
        err = float(np.max(np.abs(back.values - f.values)) / np.max(np.abs(f.values)))
        rep.series[name] = [err]
        rep.add("AC1", f"roundtrip_{name}", err, tol, err < tol, "max relative error")
    x = g.x
    exact = 0.5 * (1.0 + np.abs(x)) * np.exp(-np.abs(x))
    got = conv_G(sample(g, lambda y: np.exp(-np.abs(y)))).values
    err = float(np.max(np.abs(got - exact)) / np.max(exact))
    rep.series["peakon_kernel"] = [err]
    rep.add("AC1", "conv_G_of_exp", err, tol, err < tol, "against (1/2)(1+|x|)exp(-|x|)")
    return rep


def temporal_order_study(cfg: RunConfig, n: int = 1025, half_width: float = 30.0,
                         T: float = 1.0, steps=(4, 8, 16, 32, 64)) -> ExperimentReport:
    """Fixed-step RK4 on one grid; differences of successive halvings give the order."""
    tol = cfg.tolerances
    g = Grid1D(-half_width, half_width, n)
    u0 = sample(g, _gauss())
    sols = [integrate_fixed(u0, T / k, k).values for k in steps]
    diffs = [float(np.max(np.abs(a - b))) for a, b in zip(sols[:-1], sols[1:])]
    orders = observed_orders(diffs)
    rep = ExperimentReport("temporal_order", {"n": n, "half_width": half_width, "T": T,
                                              "steps": list(steps)})
    rep.series.update({"dt": [T / k for k in steps[:-1]], "difference": diffs})
    rep.extra["orders"] = orders
    worst = max(abs(o - tol.temporal_order) for o in orders)
    rep.add("AC2", "temporal_order", float(np.mean(orders)), tol.temporal_order_tol,
            worst <= tol.temporal_order_tol, f"observed orders {orders}")
    return rep


def spatial_order_study(cfg: RunConfig, ns=(257, 513, 1025, 2049), n_ref: int = 4097,
                        half_width: float = 30.0, dt: float = 0.01, T: float = 1.0):
    """Nested grids with a shared small time step against the finest grid."""
    tol = cfg.tolerances
    steps = int(round(T / dt))
    ref = integrate_fixed(sample(Grid1D(-half_width, half_width, n_ref), _gauss()), dt,
                          steps).values
    errs = []
    for n in ns:
        stride = (n_ref - 1) // (n - 1)
        if stride * (n - 1) != n_ref - 1:
            raise ValueError(f"grid n={n} is not nested in n_ref={n_ref}")
        u = integrate_fixed(sample(Grid1D(-half_width, half_width, n), _gauss()), dt, steps)
        errs.append(float(np.max(np.abs(u.values - ref[::stride]))))
    orders = observed_orders(errs)
    rep = ExperimentReport("spatial_order", {"ns": list(ns), "n_ref": n_ref, "dt": dt, "T": T})
    rep.series.update({"n": list(ns), "error": errs})
    rep.extra["orders"] = orders
    rep.add("AC2", "spatial_order", min(orders), tol.spatial_order_min,
            min(orders) >= tol.spatial_order_min, f"observed orders {orders}")
    return rep


def conservation_check(cfg: RunConfig, T: float = 1.0) -> ExperimentReport:
    """Relative drift of H1 and of int h dx over smooth runs on the configured grid."""
    tol = cfg.tolerances.conservation_rel_tol
    g = cfg.grid
    tcfg = TimeStepConfig(cfg.time.cfl, cfg.time.dt_max, T, 1)
    rep = ExperimentReport("conservation", {"grid": cfg.to_dict()["grid"], "T": T})
    cases = {
        "gaussian": sample(g, _gauss()),
        "compact_bump": InitialData("compact_bump", amplitude=0.25, width=2.0).field(g),
    }
    for name, u0 in cases.items():
        traj = evolve(u0, tcfg, [lambda s: {"H1": H1(s.u), "M0": M0(s.u)}])
        for q in ("H1", "M0"):
            v = traj.series(q)
            drift = float(np.max(np.abs(v - v[0])) / abs(v[0]))
            rep.series[f"{name}_{q}"] = list(v)
            rep.add("AC3", f"{q}_drift_{name}", drift, tol, drift < tol, "max relative drift")
    return rep


def flow_conservation_study(cfg: RunConfig, ns=(513, 1025, 2049, 4097),
                            half_width: float = 30.0, T: float = 0.5) -> ExperimentReport:
    """Residual of h(eta) J^2 = h0 under simultaneous space-time refinement."""
    tol = cfg.tolerances
    tcfg = TimeStepConfig(cfg.time.cfl, cfg.time.dt_max, T, 1)
    errs = []
    for n in ns:
        g = Grid1D(-half_width, half_width, n)
        u0 = sample(g, _gauss())
        traj = evolve(u0, tcfg, [], keep_snapshots=True)
        fs = track_flow(VelocityRecord.from_trajectory(traj), seed_labels(g))[-1]
        h0 = apply_helmholtz(u0)
        res = check_momentum_conservation(fs, apply_helmholtz(traj.final.u), h0)
        errs.append(res.max_abs / float(np.max(np.abs(h0.values))))
    orders = observed_orders(errs)
    rep = ExperimentReport("flow_conservation", {"ns": list(ns), "T": T})
    rep.series.update({"n": list(ns), "residual": errs})
    rep.extra["orders"] = orders
    rep.add("AC3", "flow_residual_order", min(orders), tol.spatial_order_min,
            min(orders) >= tol.spatial_order_min and all(np.diff(errs) < 0),
            f"observed orders {orders}")
    return rep


def kernel_bound_study(cfg: RunConfig, thetas=KERNEL_THETAS, Ns=KERNEL_NS) -> ExperimentReport:
    """sup_x phi_N(x) int exp(-|x-y|)/phi_N(y) dy for several theta and N."""
    tol = cfg.tolerances.kernel_stability_tol
    g = cfg.grid
    rep = ExperimentReport("kernel_bound", {"thetas": list(thetas), "Ns": list(Ns)})
    rep.series["N"] = list(Ns)
    for th in thetas:
        vals = [kernel_weight_bound(g, WeightProfile(th, N)) for N in Ns]
        rep.series[f"theta={th}"] = vals
        finite = all(math.isfinite(v) for v in vals)
        spread = (max(vals) - min(vals)) / max(vals)
        rep.add("AC11", f"kernel_bound_finite_theta={th}", max(vals), math.inf, finite, "")
        rep.add("AC11", f"kernel_bound_stable_theta={th}", spread, tol, spread < tol,
                f"values {vals}")
    return rep


def run_convergence(cfg: RunConfig) -> ExperimentReport:
    parts = [operator_identity_check(cfg), temporal_order_study(cfg), spatial_order_study(cfg),
             conservation_check(cfg), flow_conservation_study(cfg), kernel_bound_study(cfg)]
    rep = ExperimentReport("convergence", cfg.to_dict())
    for p in parts:
        rep.verdicts.extend(p.verdicts)
        for k, v in p.series.items():
            rep.series[f"{p.name}.{k}"] = v
        if p.extra:
            rep.extra[p.name] = p.extra
    return rep
