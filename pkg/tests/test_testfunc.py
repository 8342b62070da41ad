import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import gamma, jv

from maprenewal.errors import OutOfTableRange
from maprenewal.renewal import CutoffFunction, TestFunctionH, evaluate_h


def bessel_closed_form(h, r):
    nu = h.d / 2 + h.p
    z = h.b * np.asarray(r, dtype=float)
    c = h.b**h.d * gamma(h.p + 1) * 2**h.p * (2 * np.pi) ** (-h.d / 2)
    return c * jv(nu, z) / z**nu


@pytest.mark.parametrize("d, b, p", [(3, 2.0, 6), (3, 1.0, 2), (4, 1.5, 3), (5, 2.0, 6)])
def test_table_matches_bessel_closed_form(d, b, p):
    h = TestFunctionH(d, b, p)
    r = np.linspace(0.05, h.radius, 3001)
    assert np.max(np.abs(h.evaluate_radial(r) - bessel_closed_form(h, r))) <= 1e-8 * h.evaluate_radial(0.0)


def test_h0_against_high_resolution_radial_quadrature():
    h = TestFunctionH(3, 1.0, 2)
    # h(0) = (2 pi)^{-3} * 4 pi * int_0^b (1 - rho^2/b^2)^p rho^2 d rho
    val, _ = integrate.quad(lambda s: (1 - s * s) ** 2 * s * s, 0, 1, epsabs=0, epsrel=1e-13)
    oracle = 4 * np.pi * val / (2 * np.pi) ** 3
    assert evaluate_h(h, np.zeros(3)) == pytest.approx(oracle, abs=1e-8)
    assert oracle > 0


def test_h0_closed_form():
    h = TestFunctionH(3, 2.0, 6)
    expected = h.b**3 * gamma(7) * (4 * np.pi) ** -1.5 / gamma(1.5 + 6 + 1)
    assert h.evaluate_radial(0.0) == pytest.approx(expected, rel=1e-12)


def test_integral_of_h_is_one():
    h = TestFunctionH(3, 2.0, 6)
    r = np.linspace(0, h.radius, 400_001)
    total = 4 * np.pi * integrate.simpson(h.evaluate_radial(r) * r * r, x=r)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_beyond_table_raises_and_envelope_bounds():
    h = TestFunctionH(3, 2.0, 6)
    with pytest.raises(OutOfTableRange):
        h.evaluate_radial(h.radius * 1.01)
    r = np.linspace(h.radius, 3 * h.radius, 1000)
    assert np.all(np.abs(bessel_closed_form(h, r)) <= h.envelope(h.radius))
    assert h.evaluate_sq(np.array([(2 * h.radius) ** 2]))[0] == 0.0


def test_p_must_reach_d_minus_one():
    with pytest.raises(ValueError):
        TestFunctionH(5, 2.0, 3)


@given(st.floats(0.0, 3.0))
def test_cutoff_range_and_monotone(s):
    chi = CutoffFunction(alpha=1.0, r=0.5)
    v = chi.radial(np.array([s, s + 0.01]))
    assert 0.0 <= v[1] <= v[0] <= 1.0


def test_cutoff_plateau_and_support():
    chi = CutoffFunction(alpha=1.0, r=0.5)
    np.testing.assert_array_equal(chi.radial(np.array([0.0, 0.5, 1.0, 2.0])), [1.0, 1.0, 0.0, 0.0])
    assert chi([0.75, 0.0, 0.0]) == pytest.approx(0.5)


def test_cutoff_is_smooth_at_the_edges():
    chi = CutoffFunction(alpha=1.0, r=0.5)
    x = 0.5 + np.array([1e-3, 2e-3])
    assert np.all(1.0 - chi.radial(x) < 1e-100)
