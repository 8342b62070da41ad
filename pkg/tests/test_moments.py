import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from maprenewal.errors import NotCentered
from maprenewal.markov_model import Gaussian, PointMass, center, gallery, make_map, mean_increment
from maprenewal.spectral import (
    asymptotic_covariance,
    autocovariance_series,
    eigenprojection,
    exact_walk_moments,
    fourier_operator,
    gradient_lambda,
)


def _point_mass_model(p=0.3, q=0.6):
    incs = [[PointMass([1.0, 0.0, 0.0]), PointMass([0.0, -1.0, 0.5])],
            [PointMass([-0.5, 0.5, 0.0]), PointMass([0.0, 0.0, -1.0])]]
    return make_map([[1 - p, p], [q, 1 - q]], incs)


def _enumerate(m, mu, n):
    """Exact E[S_n], E[S_n S_n^T] by summing over all 2^n paths."""
    mean = np.zeros(3)
    second = np.zeros((3, 3))
    for x0 in range(2):
        for path in itertools.product(range(2), repeat=n):
            prob, s, prev = mu[x0], np.zeros(3), x0
            for y in path:
                prob *= m.P[prev, y]
                s = s + m.law(prev, y).v
                prev = y
            mean += prob * s
            second += prob * np.outer(s, s)
    return mean, second


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_moment_recursion_matches_path_enumeration(n):
    m = _point_mass_model()
    mu = np.array([0.25, 0.75])
    mean, second = exact_walk_moments(m, n, mu)
    em, es = _enumerate(m, mu, n)
    np.testing.assert_allclose(mean, em, atol=1e-13)
    np.testing.assert_allclose(second, es, atol=1e-12)


def test_gaussian_iid_covariance_is_step_covariance():
    C = np.array([[1.5, 0.2, 0.0], [0.2, 1.0, -0.3], [0.0, -0.3, 0.8]])
    m = gallery("iid", cov=C)
    res = asymptotic_covariance(m)
    np.testing.assert_allclose(res.Sigma, C, atol=1e-8)
    assert res.positive_definite


def test_two_state_lambda_is_root_of_characteristic_polynomial(two_state):
    t = np.array([0.4, -0.1, 0.3])
    Q = np.asarray(fourier_operator(two_state, t))
    tr, det = np.trace(Q), np.linalg.det(Q)
    roots = (tr + np.array([1, -1]) * np.sqrt(tr * tr - 4 * det)) / 2
    lam = eigenprojection(two_state, t).lam
    assert np.min(np.abs(roots - lam)) < 1e-13


def test_covariance_matches_autocovariance_series(two_state):
    res = asymptotic_covariance(two_state)
    auto = autocovariance_series(two_state, 400)
    assert np.linalg.norm(res.Sigma - auto) / np.linalg.norm(auto) < 1e-6
    assert res.moment_rel_err < 0.02
    assert res.asymmetry < 1e-6


@given(st.floats(0.05, 0.9), st.floats(0.05, 0.9))
def test_two_state_covariance_closed_form(p, q):
    # symmetric +-v increments chosen by the destination state
    v = np.array([1.0, 0.5, 0.0])
    s2 = 0.3
    up, down = Gaussian(v, s2 * np.eye(3)), Gaussian(-v, s2 * np.eye(3))
    m = center(make_map([[1 - p, p], [q, 1 - q]], [[up, down], [up, down]]))
    pi0 = q / (p + q)
    r = 1 - p - q  # second eigenvalue of P
    # the destination sign sequence is a stationary chain with lag correlation r^k
    mean_sign = 2 * pi0 - 1
    var_sign = 1 - mean_sign**2
    expected = s2 * np.eye(3) + var_sign * (1 + r) / (1 - r) * np.outer(v, v)
    np.testing.assert_allclose(autocovariance_series(m, 2000), expected, atol=1e-8)


def test_gradient_vanishes_when_centred(doeblin):
    assert np.max(np.abs(gradient_lambda(doeblin))) < 1e-7


def test_gradient_equals_drift_when_not_centred():
    m = gallery("doeblin_k_state", centered=False)
    np.testing.assert_allclose(gradient_lambda(m), mean_increment(m), atol=1e-6)


def test_uncentred_covariance_raises():
    with pytest.raises(NotCentered):
        asymptotic_covariance(gallery("doeblin_k_state", centered=False))
