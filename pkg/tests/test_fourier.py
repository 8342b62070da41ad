import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from maprenewal.errors import NotCentered, SingularResolvent
from maprenewal.markov_model import gallery
from maprenewal.renewal import (
    FourierRenewal,
    TestFunctionH,
    asymptote,
    decay_check_J_K,
    default_cutoff,
    i2_asymptotic_check,
    lattice_scan,
    renewal_sums_mc,
)


@pytest.fixture(scope="module")
def iid_engine():
    return FourierRenewal(gallery("iid"), h=TestFunctionH(3, 2.0, 6))


@pytest.fixture(scope="module")
def two_state_engine():
    return FourierRenewal(gallery("two_state"), h=TestFunctionH(3, 2.0, 6))


def test_split_identities(two_state_engine):
    s = two_state_engine.split([8.0, 4.0, 0.0])
    tol = 10 * s.quadrature_error + 1e-12
    assert abs(s.I - (s.I1 + s.I2 + s.I3)) <= tol
    assert s.split_residual <= tol
    assert s.total == pytest.approx(s.I + s.J + s.K)


def test_single_state_remainder_is_exactly_zero(iid_engine):
    assert iid_engine.split([0.0, 0.0, 12.0]).J == 0.0


def test_estimates_are_real(two_state_engine):
    s = two_state_engine.split([0.0, 9.0, 3.0])
    assert abs(s.total.imag) / (2 * np.pi) ** 3 < 1e-9


def test_iid_value_approaches_asymptote(iid_engine):
    est = iid_engine.estimates([[20.0, 0.0, 0.0]])[0]
    asy = asymptote(3, np.eye(3), 1.0, 1.0, [20.0, 0.0, 0.0])
    assert est.value / asy == pytest.approx(1.0, abs=1e-4)


def test_fourier_total_recovers_asymptote_constant(iid_engine):
    # total / (2 pi)^d ~ C_d / |a|^(d-2): the primed constant is (2 pi)^d C_d
    a = np.array([0.0, 30.0, 0.0])
    s = iid_engine.split(a)
    assert s.renewal_value.real * 30.0 == pytest.approx(1 / (2 * np.pi), rel=1e-4)


def test_rotation_equivariance(iid_engine):
    base = np.array([15.0, 0.0, 0.0])
    ests = iid_engine.estimates([base] + [Rotation.random(random_state=k).apply(base) for k in range(3)])
    ref = ests[0]
    for e in ests[1:]:
        assert abs(e.value - ref.value) <= e.error + ref.error + 1e-14


def test_tolerance_halving_is_within_reported_error():
    m = gallery("two_state")
    a = [[6.0, 6.0, 0.0]]
    coarse = FourierRenewal(m, rtol=1e-6).estimates(a)[0]
    fine = FourierRenewal(m, rtol=5e-7).estimates(a)[0]
    assert abs(coarse.value - fine.value) <= coarse.error + 1e-15


def test_route_agreement_with_monte_carlo(two_state_engine):
    m = gallery("two_state")
    a = [np.array([6.0, 3.0, 0.0])]
    f = two_state_engine.estimates(a)[0]
    mc = renewal_sums_mc(m, np.ones(2), m.stationary(), a, two_state_engine.h, 8000, seed=4,
                         n_max=3000, Sigma=two_state_engine.Sigma)[0]
    assert abs(f.value - mc.value) <= 3 * (f.error + mc.error)


def test_lattice_model_rejected():
    m = gallery("lattice_negative_control")
    with pytest.raises(SingularResolvent):
        lattice_scan(m, 0.5, 6.5)
    with pytest.raises(SingularResolvent):
        FourierRenewal(m, h=TestFunctionH(3, 6.5, 6))


def test_uncentred_model_rejected():
    with pytest.raises(NotCentered):
        FourierRenewal(gallery("doeblin_k_state", centered=False))


def test_default_cutoff_inside_perturbation_ball(two_state):
    chi = default_cutoff(two_state)
    assert 0 < chi.r < chi.alpha < 0.5


def test_i2_matches_prediction_at_large_shift():
    S = np.array([[1.2, 0.3, 0.0], [0.3, 0.8, 0.1], [0.0, 0.1, 0.6]])
    h = TestFunctionH(3, 2.0, 6)
    chi = default_cutoff(gallery("iid", cov=S), S)
    row = i2_asymptotic_check(S, h, chi, [[25.0, 25.0, 0.0]])[0]
    assert abs(row.ratio - 1.0) < 0.05


def test_decay_of_remainder_integrals(iid_engine):
    m = gallery("iid")
    table = decay_check_J_K(m, np.ones(1), np.ones(1), iid_engine.h, iid_engine.chi,
                            [[10.0, 0, 0], [20.0, 0, 0], [40.0, 0, 0]], engine=iid_engine)
    assert table.jk_drop >= 3.0
    assert table.i13_drop >= 3.0
