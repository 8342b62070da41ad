import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from maprenewal.errors import GapTooSmall, SingularResolvent
from maprenewal.markov_model import Gaussian, gallery, make_map
from maprenewal.spectral import (
    ContourSpec,
    choose_kappa,
    decomposition_residual,
    eigenprojection,
    ergodicity_check,
    expansion_identity_check,
    fourier_operator,
    fourier_operator_batch,
    lambda_grid_csv,
    lambda_quotient,
    node_count,
    perturbation_radius,
    remainder_powers,
    resolvent_apply,
    resolvent_stack,
    spectral_fields,
    spectral_radius,
    verify_semigroup,
)


def _eig_near_one(Q):
    w = np.linalg.eigvals(Q)
    return w[np.argmin(np.abs(w - 1.0))]


def test_operator_at_zero_is_transition_matrix(doeblin):
    np.testing.assert_allclose(np.asarray(fourier_operator(doeblin, np.zeros(3))), doeblin.P, atol=1e-15)


def test_operator_entries(two_state):
    t = np.array([0.3, -0.4, 0.2])
    Q = np.asarray(fourier_operator(two_state, t))
    for x in range(2):
        for y in range(2):
            assert Q[x, y] == pytest.approx(two_state.P[x, y] * two_state.law(x, y).cf(t))


def test_batch_matches_single(doeblin, rng):
    ts = rng.normal(size=(5, 3))
    batch = fourier_operator_batch(doeblin, ts)
    for t, Q in zip(ts, batch):
        np.testing.assert_allclose(Q, np.asarray(fourier_operator(doeblin, t)), atol=1e-15)


@given(arrays(np.float64, (4, 4), elements=st.floats(-1, 1)), arrays(np.float64, (4, 4), elements=st.floats(-1, 1)))
def test_spectral_radius_matches_eigvals(a, b):
    M = a + 1j * b
    exact = np.max(np.abs(np.linalg.eigvals(M)))
    if exact < 1e-3:
        return
    # ties between distinct eigenvalues of equal modulus slow power iteration; compare loosely
    assert spectral_radius(M, tol=1e-13, max_iter=200_000) == pytest.approx(exact, rel=1e-6)


def test_resolvent_apply_matches_solve(doeblin):
    Q = np.asarray(fourier_operator(doeblin, [0.2, 0.1, 0.0]))
    v = np.array([1.0, 2.0, -1.0], dtype=complex)
    z = 1.3 + 0.2j
    np.testing.assert_allclose(resolvent_apply(Q, z, v), np.linalg.solve(z * np.eye(3) - Q, v), atol=1e-13)


def test_resolvent_near_eigenvalue_is_singular(doeblin):
    with pytest.raises(SingularResolvent):
        resolvent_apply(doeblin.P, 1.0, np.ones(3))
    with pytest.raises(SingularResolvent):
        resolvent_stack(doeblin.P, np.array([1.0 + 0j]))


def test_contour_integral_of_polynomial():
    c = ContourSpec(0.5, 0.3, 64)
    z = c.points()
    # (1/(2 pi i)) \oint dz / (z - 0.5) = 1, \oint (z - 0.5)^k dz = 0
    assert c.integrate(1.0 / (z - 0.5)) == pytest.approx(1.0)
    assert abs(c.integrate(z**3)) < 1e-14


def test_node_count_floor():
    assert node_count(0.3) == 128
    assert node_count(0.995) > 128


def test_kappa_between_gap_and_one(doeblin):
    k = choose_kappa(doeblin)
    rho2 = np.sort(np.abs(np.linalg.eigvals(doeblin.P)))[-2]
    assert rho2 < k < 1.0


def test_tiny_gap_raises():
    eps = 1e-9
    m = make_map([[1 - eps, eps], [eps, 1 - eps]], [[Gaussian(np.zeros(3), np.eye(3))] * 2] * 2)
    with pytest.raises(GapTooSmall):
        choose_kappa(m)


@pytest.mark.parametrize("name", ["two_state", "doeblin_k_state", "lattice_negative_control"])
def test_eigenvalue_matches_eigvals_oracle(name, rng):
    m = gallery(name)
    r = perturbation_radius(m)
    for _ in range(5):
        t = rng.normal(size=3)
        t *= 0.8 * r * rng.uniform() / np.linalg.norm(t)
        dec = eigenprojection(m, t)
        assert dec.lam == pytest.approx(_eig_near_one(np.asarray(fourier_operator(m, t))), abs=1e-12)
        assert dec.rank == 1
        np.testing.assert_allclose(dec.Pi @ dec.Pi, dec.Pi, atol=1e-10)
        np.testing.assert_allclose(dec.Q @ dec.Pi, dec.lam * dec.Pi, atol=1e-10)


def test_projection_at_zero_is_one_pi(doeblin):
    dec = eigenprojection(doeblin, np.zeros(3))
    np.testing.assert_allclose(dec.Pi, np.outer(np.ones(3), doeblin.stationary()), atol=1e-12)
    assert dec.lam == pytest.approx(1.0, abs=1e-14)


def test_decomposition_residual_small(two_state):
    assert decomposition_residual(two_state, [0.2, -0.1, 0.1]) < 1e-12


def test_two_lambda_routes_agree(doeblin):
    t = np.array([0.3, -0.2, 0.25])
    assert lambda_quotient(doeblin, t) == pytest.approx(eigenprojection(doeblin, t).lam, abs=1e-13)


def test_expansion_identity(two_state):
    assert expansion_identity_check(two_state, [0.1, 0.2, -0.1], n=15) < 1e-13


def test_remainder_neumann_series(doeblin):
    # sum_n N^n computed power by power equals the resummed contour value
    res = remainder_powers(doeblin, [0.2, 0.1, -0.1], n_max=200)
    assert res.consistent
    assert res.mismatch < 1e-12
    dec = eigenprojection(doeblin, [0.2, 0.1, -0.1])
    N = dec.Q - dec.lam * dec.Pi
    mu, f = np.ones(3) / 3, np.ones(3)
    direct = sum(mu @ np.linalg.matrix_power(N, n) @ f for n in range(1, 200))
    assert res.resummed == pytest.approx(direct, abs=1e-12)


def test_single_state_has_no_remainder(iid):
    dec = eigenprojection(iid, [0.3, 0.1, 0.0])
    assert abs(dec.resummed_remainder()) < 1e-15
    fields = spectral_fields(iid, [[0.3, 0.1, 0.0]], np.ones(1), np.ones(1))
    assert fields.sum_R[0] == 0.0


def test_spectral_fields_match_pointwise(doeblin, rng):
    ts = rng.normal(size=(6, 3))
    ts *= 0.8 * perturbation_radius(doeblin) * rng.uniform(size=(6, 1)) / np.linalg.norm(ts, axis=1, keepdims=True)
    mu, f = doeblin.stationary(), np.array([1.0, 2.0, 0.5])
    fields = spectral_fields(doeblin, ts, f, mu)
    for k, t in enumerate(ts):
        dec = eigenprojection(doeblin, t)
        assert fields.lam[k] == pytest.approx(dec.lam, abs=1e-12)
        assert fields.L[k] == pytest.approx(mu @ dec.Pi @ f, abs=1e-12)
        assert fields.sum_R[k] == pytest.approx(dec.resummed_remainder(f, mu), abs=1e-11)


def test_ergodicity_geometric(doeblin):
    norms, rho2 = ergodicity_check(doeblin, 30)
    assert norms[-1] < 1e-6
    assert rho2 == pytest.approx(np.sort(np.abs(np.linalg.eigvals(doeblin.P)))[-2], abs=1e-9)


def test_semigroup_monte_carlo(two_state):
    chk = verify_semigroup(two_state, [0.3, 0.0, 0.1], 2, 3, 100_000, seed=1)
    assert chk.matrix_residual < 1e-13
    assert chk.residual < 5 * chk.stderr.max() + 1e-3


def test_lambda_grid_csv(two_state):
    text = lambda_grid_csv(two_state, [[0.1, 0, 0], [0.2, 0, 0]])
    lines = text.strip().split("\n")
    assert lines[0] == "t1,t2,t3,re_lambda,im_lambda,abs_lambda,residual"
    assert len(lines) == 3


def test_diagonal_route_matches_resolvent_route(doeblin, monkeypatch):
    import maprenewal.spectral.decomposition as dec

    rng = np.random.default_rng(3)
    ts = rng.normal(size=(300, 3))
    ts *= 0.3 * rng.random(300)[:, None] / np.linalg.norm(ts, axis=1)[:, None]
    f, mu = np.arange(1.0, 4.0), doeblin.stationary()
    fast = dec.spectral_fields(doeblin, ts, f, mu)
    monkeypatch.setattr(dec, "EIG_COND_MAX", 0.0)
    slow = dec.spectral_fields(doeblin, ts, f, mu)
    for x, y in ((fast.lam, slow.lam), (fast.L, slow.L), (fast.sum_R, slow.sum_R)):
        np.testing.assert_allclose(x, y, rtol=0, atol=1e-12)
