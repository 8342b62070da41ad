import numpy as np
import pytest

from maprenewal.errors import ModelValidationError
from maprenewal.markov_model import ContinuousARModel, Gaussian, gallery, simulate_ar


@pytest.fixture
def model():
    A = np.array([[0.5, 0.2, 0.0], [0.0, 0.3, 0.1], [0.1, 0.0, 0.4]])
    noise = Gaussian([0.2, 0.0, -0.1], np.diag([1.0, 0.5, 2.0]))
    return ContinuousARModel(A, noise)


def test_stationary_covariance_is_lyapunov_fixed_point(model):
    C = model.stationary_covariance()
    np.testing.assert_allclose(C, model.A @ C @ model.A.T + model.noise.cov, atol=1e-13)


def test_scalar_ar_closed_form():
    m = gallery("ar1_gaussian")  # A = 0.5 I, unit noise
    np.testing.assert_allclose(m.stationary_covariance(), np.eye(3) / (1 - 0.25))
    np.testing.assert_allclose(m.asymptotic_covariance(), np.eye(3) / 0.25)


def test_walk_covariance_converges(model):
    S = model.asymptotic_covariance()
    gaps = [np.linalg.norm(model.walk_covariance(n) / n - S) for n in (50, 200, 800)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] / np.linalg.norm(S) < 5e-3


def test_simulated_walk_covariance(model):
    n = 30
    S = simulate_ar(model, n, 60_000, seed=2)
    np.testing.assert_allclose(S.mean(axis=0), 0.0, atol=0.15)
    np.testing.assert_allclose(np.cov(S.T), model.walk_covariance(n), rtol=0.04, atol=0.5)


def test_simulation_deterministic(model):
    np.testing.assert_array_equal(simulate_ar(model, 5, 100, seed=1), simulate_ar(model, 5, 100, seed=1))


def test_unstable_matrix_rejected():
    with pytest.raises(ModelValidationError):
        ContinuousARModel(np.eye(3), Gaussian(np.zeros(3), np.eye(3)))
