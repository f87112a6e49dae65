import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import chtails.dynamics as dyn
from chtails.diagnostics import H1
from chtails.dynamics import (BlowUpError, SolverState, TimeStepConfig, choose_dt, evolve,
                              evolve_momentum, integrate_fixed, rhs, rhs_momentum, step_rk4)
from chtails.grid import Field, Grid1D, d1, d2, sample
from chtails.greens import apply_helmholtz
from chtails.initial_data import InitialData

G = Grid1D(-30.0, 30.0, 2049)


def test_zero_is_a_fixed_point():
    u0 = Field(G, np.zeros(G.n))
    traj = evolve(u0, TimeStepConfig(t_end=0.2))
    assert np.all(traj.final.u.values == 0.0) and traj.final.t == 0.2
    assert choose_dt(u0.values, G.dx, TimeStepConfig(dt_max=0.05)) == 0.05


def test_odd_parity_is_preserved():
    # u(x) -> -u(-x) is a symmetry of the equation
    u0 = sample(G, lambda x: 0.25 * x * np.exp(-x * x))
    u = evolve(u0, TimeStepConfig(t_end=0.5)).final.u.values
    assert np.max(np.abs(u + u[::-1])) < 1e-9


def test_even_parity_reflects_to_odd_rhs():
    u0 = sample(G, lambda x: 0.25 * np.exp(-x * x))
    r = rhs(u0).values
    assert np.max(np.abs(r + r[::-1])) < 1e-12


def test_peakon_is_a_traveling_wave_of_the_rhs():
    # away from the crest, u_t = -c u_x for the peakon c e^{-|x|}
    c = 0.8
    g = Grid1D(-40.0, 40.0, 8001)
    u = sample(g, lambda x: c * np.exp(-np.abs(x)))
    r = rhs(u).values
    away = (np.abs(g.x) > 0.5) & (np.abs(g.x) < 20)
    exact = -c * (c * np.sign(g.x) * -np.exp(-np.abs(g.x)))
    # the kink of F limits the convolution to O(dx^2) here
    np.testing.assert_allclose(r[away], exact[away], atol=1e-3)


def test_rhs_momentum_matches_helmholtz_of_rhs():
    g = Grid1D(-40.0, 40.0, 4001)
    u = sample(g, lambda x: 0.25 * np.exp(-x * x / 2))
    h = apply_helmholtz(u)
    lhs = rhs_momentum(h, u).values
    via_u = apply_helmholtz(rhs(u)).values
    inner = slice(100, -100)
    assert np.max(np.abs(lhs[inner] - via_u[inner])) < 1e-4


def test_series_length_with_stride():
    u0 = sample(G, lambda x: 0.25 * np.exp(-x * x))
    cfg = TimeStepConfig(dt_max=0.01, t_end=0.23, monitor_stride=3)
    traj = evolve(u0, cfg, [lambda s: {"H1": H1(s.u)}])
    assert traj.steps == 23
    # t=0, every third step, and t_end
    assert len(traj.times) == traj.steps // 3 + 2
    assert np.all(np.diff(traj.times) > 0) and traj.times[-1] == 0.23
    assert np.all(np.isfinite(traj.series("H1")))


def test_series_length_when_stride_divides_steps():
    u0 = sample(G, lambda x: 0.25 * np.exp(-x * x))
    traj = evolve(u0, TimeStepConfig(dt_max=0.01, t_end=0.2, monitor_stride=5))
    assert traj.steps == 20
    assert len(traj.times) == traj.steps // 5 + 1


def test_output_times_are_hit_exactly():
    u0 = sample(G, lambda x: 0.25 * np.exp(-x * x))
    traj = evolve(u0, TimeStepConfig(dt_max=0.03, t_end=0.5, monitor_stride=1000),
                  output_times=[0.1, 0.25])
    assert traj.times == [0.0, 0.1, 0.25, 0.5]


def test_velocity_and_momentum_forms_agree():
    g = Grid1D(-40.0, 40.0, 4097)
    u0 = InitialData("gaussian", amplitude=0.25, width=1.0).field(g)
    cfg = TimeStepConfig(t_end=0.5)
    u = evolve(u0, cfg).final.u.values
    t, h, u2 = evolve_momentum(apply_helmholtz(u0), cfg)
    assert t == 0.5
    assert np.max(np.abs(u - u2.values)) < 1e-6


def test_integrate_fixed_matches_evolve():
    u0 = sample(G, lambda x: 0.25 * np.exp(-x * x))
    a = integrate_fixed(u0, 0.01, 10).values
    b = evolve(u0, TimeStepConfig(dt_max=0.01, t_end=0.1)).final.u.values
    assert np.max(np.abs(a - b)) < 1e-13


def test_blow_up_gives_partial_trajectory(monkeypatch):
    u0 = sample(G, lambda x: 0.25 * np.exp(-x * x))
    real = dyn.rhs_values
    calls = {"n": 0}

    def poisoned(u, dx, order=4):
        calls["n"] += 1
        out = real(u, dx, order)
        return out * np.inf if calls["n"] > 20 else out

    monkeypatch.setattr(dyn, "rhs_values", poisoned)
    traj = evolve(u0, TimeStepConfig(dt_max=0.01, t_end=1.0))
    assert traj.partial and "blow-up" in traj.error
    assert traj.final.t == pytest.approx(0.05)
    assert np.all(np.isfinite(traj.final.u.values))


def test_step_raises_on_collapsed_dt():
    s = SolverState(0.0, sample(G, lambda x: np.exp(-x * x)))
    with pytest.raises(BlowUpError, match="underflow"):
        step_rk4(s, TimeStepConfig(), dt=1e-15)


@pytest.mark.parametrize("kw", [dict(cfl=0.0), dict(cfl=0.7), dict(dt_max=0.0),
                                dict(t_end=-1.0), dict(monitor_stride=0)])
def test_time_config_validation(kw):
    with pytest.raises(ValueError):
        TimeStepConfig(**kw)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.02, 0.25), st.floats(-2.0, 2.0))
def test_conserved_quantities_property(a, x0):
    g = Grid1D(-40.0, 40.0, 2049)
    u0 = sample(g, lambda x: a * np.exp(-((x - x0) ** 2)))
    traj = evolve(u0, TimeStepConfig(t_end=0.3))
    u = traj.final.u
    h1_0, h1 = H1(u0), H1(u)
    m0 = np.trapezoid(u0.values - d2(u0.values, g.dx), dx=g.dx)
    m = np.trapezoid(u.values - d2(u.values, g.dx), dx=g.dx)
    assert abs(h1 - h1_0) < 1e-6 * h1_0
    assert abs(m - m0) < 1e-8 * abs(m0)
