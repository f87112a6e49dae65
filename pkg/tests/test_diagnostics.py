import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chtails.diagnostics import (H1, M0, F_field, WeightProfile, c_minus_estimate,
                                 c_plus_estimate, check_E_plus_zero_initial,
                                 exp_weighted_integral, fit_tail, momentum_support,
                                 tail_coefficients, weighted_norm_sum, weighted_sup)
from chtails.grid import Field, Grid1D, sample, tail_window
from chtails.greens import apply_helmholtz, conv_G
from chtails.initial_data import InitialData, bump, mollifier

REF = Grid1D(-60.0, 60.0, 8192)
RW = tail_window(REF, "right", 45.0, 10.0)
LW = tail_window(REF, "left", 45.0, 10.0)


def test_F_field_of_linear_profile():
    g = Grid1D(-1.0, 1.0, 41)
    u = sample(g, lambda x: 2 * x)
    np.testing.assert_allclose(F_field(u).values, 4 * g.x**2 + 2.0, atol=1e-10)


def test_weight_profile_shape():
    w = WeightProfile(0.5, 10.0)
    np.testing.assert_allclose(w([-3.0, 0.0, 4.0, 10.0, 30.0]),
                               [1.0, 1.0, math.exp(2.0), math.exp(5.0), math.exp(5.0)])
    np.testing.assert_allclose(w.derivative([-1.0, 4.0, 11.0]), [0.0, 0.5 * math.exp(2.0), 0.0])
    for bad in ((0.0, 1.0), (1.0, 1.0), (0.5, 0.0)):
        with pytest.raises(ValueError):
            WeightProfile(*bad)


def test_weighted_sup_and_sum():
    g = Grid1D(-20.0, 20.0, 4001)
    w = WeightProfile(0.5, 5.0)
    u = sample(g, lambda x: np.exp(-0.5 * np.abs(x)))
    assert abs(weighted_sup(u, w) - 1.0) < 1e-12
    v = sample(g, lambda x: np.exp(-x * x / 8))
    xs = np.linspace(-20, 20, 400001)
    du = np.abs(xs / 4 * np.exp(-xs * xs / 8))
    su, sux = weighted_norm_sum(v, w, "right")
    # node maxima sit within O(dx^2) of the continuous maxima
    assert abs(su - np.max(np.exp(-xs * xs / 8) * w(xs))) < 1e-4
    assert abs(sux - np.max(du * w(xs))) < 1e-4
    sl, sxl = weighted_norm_sum(v, w, "left")
    assert abs(sl - su) < 1e-12 and abs(sxl - sux) < 1e-9


def test_fit_tail_exact_exponential():
    u = sample(REF, lambda x: 3.0 * np.exp(-np.abs(x)))
    fr = fit_tail(u, RW)
    assert abs(fr.slope + 1) < 1e-10 and abs(fr.log_prefactor - math.log(3.0)) < 1e-9
    assert fr.r2 > 1 - 1e-12 and not fr.below_floor
    assert abs(fit_tail(u, LW).slope - 1) < 1e-10


def test_fit_tail_gaussian_is_not_exponential():
    u = sample(REF, lambda x: np.exp(-x * x / 50.0))
    assert fit_tail(u, RW).r2 < 0.999


def test_fit_tail_below_floor():
    u = Field(REF, bump(REF.x, 0.0, 2.0))
    fr = fit_tail(u, RW)
    assert fr.below_floor and math.isnan(fr.slope)
    assert c_plus_estimate(u, RW).below_floor


def test_point_mass_tail_coefficients():
    # h = 2 c delta_q  =>  E+ = c e^q, E- = c e^{-q}
    for c, q in ((1.0, 0.0), (0.7, 2.0), (0.3, -1.5)):
        h = Field(REF, 2 * c * mollifier(REF, q, 0.05))
        tc = tail_coefficients(h, 0.0)
        assert abs(tc.E_plus - c * math.exp(q)) < 2e-3 * c * math.exp(q)
        assert abs(tc.E_minus - c * math.exp(-q)) < 2e-3 * c * math.exp(-q)


def test_gaussian_momentum_E_plus():
    h = sample(REF, lambda x: np.exp(-x * x))
    tc = tail_coefficients(h, 0.0)
    exact = 0.5 * math.sqrt(math.pi) * math.exp(0.25)
    assert abs(tc.E_plus - exact) < 1e-10 and abs(tc.E_minus - exact) < 1e-10
    assert tc.dE_plus_dt_pred > 0 and tc.dE_minus_dt_pred < 0


def test_exp_weighted_integral_far_from_origin():
    # e^{x} alone overflows beyond x ~ 709; the shifted form must not
    x = np.linspace(650.0, 700.0, 5001)
    v = np.exp(-(x - 650.0)) * np.exp(-650.0)
    assert math.isclose(exp_weighted_integral(v, x, +1), 50.0, rel_tol=1e-12)
    assert math.isclose(exp_weighted_integral(v[::-1], -x[::-1], -1), 50.0, rel_tol=1e-12)


def test_E_plus_initial_compact_and_peakon_control():
    assert abs(check_E_plus_zero_initial(Field(REF, 0.25 * bump(REF.x, 0, 2)))) < 1e-8
    u0 = InitialData("smoothed_peakon", c=1.0, center=0.0, epsilon=0.1).field(REF)
    assert abs(check_E_plus_zero_initial(u0) - 1.0) < 0.01


def test_momentum_support():
    h = Field(REF, bump(REF.x, 1.0, 2.0))
    a, b = momentum_support(h, 1e-8)
    assert -1.0 < a < -0.9 and 2.9 < b < 3.0
    assert momentum_support(Field(REF, np.zeros(REF.n))) is None
    with pytest.raises(ValueError):
        momentum_support(h, 0.0)


def test_c_plus_c_minus_plateaus():
    u = conv_G(Field(REF, bump(REF.x, 0.0, 2.0)))
    h = apply_helmholtz(u)
    tc = tail_coefficients(h, 0.0, u)
    cp, cm = c_plus_estimate(u, RW), c_minus_estimate(u, LW)
    assert abs(cp.value - tc.E_plus) < 1e-6 * tc.E_plus
    assert abs(cm.value - tc.E_minus) < 1e-6 * tc.E_minus
    assert cp.max_dev < 1e-6 * cp.value


def test_invariants_of_sech():
    # int sech^2 = 2, int sech^2 tanh^2 = 2/3, int (u - u'') = int sech = pi
    u = sample(REF, lambda x: 1 / np.cosh(x))
    assert abs(H1(u) - 8.0 / 3.0) < 1e-7
    assert abs(M0(u) - math.pi) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(-3, 3))
def test_E_plus_scales_and_shifts(a, s):
    # E+ of a * h(x - s) = a e^s E+(h)
    g = Grid1D(-40.0, 40.0, 4001)
    base = tail_coefficients(sample(g, lambda x: np.exp(-x * x)), 0.0).E_plus
    moved = tail_coefficients(sample(g, lambda x: a * np.exp(-((x - s) ** 2))), 0.0).E_plus
    assert math.isclose(moved, a * math.exp(s) * base, rel_tol=1e-9)
