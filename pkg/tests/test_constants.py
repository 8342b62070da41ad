import math

import numpy as np
import pytest

from maprenewal.errors import DimensionTooSmall, SigmaNotPD, ZeroShift
from maprenewal.renewal import asymptote, constant_Cd, constant_Cd_prime


def test_cd_prime_d3_identity():
    assert constant_Cd_prime(3, np.eye(3)) == pytest.approx((2 * math.pi) ** 2, rel=1e-14)


def test_cd_d3_identity():
    # Green's function of the standard Gaussian walk: 1 / (2 pi |x|)
    assert constant_Cd(3, np.eye(3)) == pytest.approx(1 / (2 * math.pi), rel=1e-14)


@pytest.mark.parametrize("d", [3, 4, 6])
def test_primed_constant_is_scaled(d):
    S = np.diag(np.linspace(0.5, 2.0, d))
    assert constant_Cd_prime(d, S) == pytest.approx((2 * math.pi) ** d * constant_Cd(d, S), rel=1e-13)


def test_asymptote_scaling():
    S = np.diag([1.0, 2.0, 4.0])
    a = np.array([1.0, 1.0, 1.0])
    assert asymptote(3, S, 1.0, 1.0, 10 * a) == pytest.approx(asymptote(3, S, 1.0, 1.0, a) / 10, rel=1e-14)


def test_errors():
    with pytest.raises(DimensionTooSmall):
        constant_Cd(2, np.eye(2))
    with pytest.raises(SigmaNotPD):
        constant_Cd(3, -np.eye(3))
    with pytest.raises(ZeroShift):
        asymptote(3, np.eye(3), 1.0, 1.0, np.zeros(3))


def test_zero_integral_gives_zero():
    assert asymptote(3, np.eye(3), 1.0, 0.0, np.ones(3)) == 0.0
