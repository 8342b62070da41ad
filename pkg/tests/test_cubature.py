import math

import numpy as np
import pytest
from scipy.special import gamma

from maprenewal.renewal import BallGrid, Panel, orthonormal_frame, sphere_rule


def area(d):
    return 2 * math.pi ** (d / 2) / gamma(d / 2)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_sphere_area(d):
    _, w, _ = sphere_rule(d, np.ones(d), 8, 8)
    assert w.sum() == pytest.approx(area(d), rel=1e-13)


@pytest.mark.parametrize("d", [3, 5])
def test_sphere_second_moments(d):
    dirs, w, _ = sphere_rule(d, np.arange(1.0, d + 1), 10, 12)
    M = np.einsum("k,ki,kj->ij", w, dirs, dirs)
    np.testing.assert_allclose(M, area(d) / d * np.eye(d), atol=1e-13)


def test_polar_cosine_is_along_axis():
    axis = np.array([1.0, 2.0, 2.0])
    dirs, _, u = sphere_rule(3, axis, 6, 8)
    np.testing.assert_allclose(dirs @ axis / 3.0, u, atol=1e-14)


def test_point_symmetry():
    dirs, w, _ = sphere_rule(3, [0.0, 0.0, 1.0], 6, 8)
    for p in dirs:
        assert np.min(np.linalg.norm(dirs + p, axis=1)) < 1e-12


def test_frame_orthogonal():
    F = orthonormal_frame([3.0, -1.0, 2.0])
    np.testing.assert_allclose(F.T @ F, np.eye(3), atol=1e-14)


def test_ball_volume_and_singular_integrand():
    g = BallGrid.build(3, [1.0, 0, 0], [Panel(0.0, 0.5, 10), Panel(0.5, 2.0, 12)], 8, 8)
    assert g.w.sum() == pytest.approx(4 / 3 * math.pi * 8, rel=1e-13)
    # int_{|t|<2} |t|^{-2} dt = 4 pi * 2
    assert g.w @ (1.0 / g.rho**2) == pytest.approx(8 * math.pi, rel=1e-13)


def test_phase_matches_direct_exponential():
    g = BallGrid.build(3, [0.0, 1.0, 0.0], [Panel(0.0, 1.0, 4)], 4, 4)
    a = 7.0 * np.array([0.0, 1.0, 0.0])
    np.testing.assert_allclose(g.phase(7.0), np.exp(-1j * g.t @ a), atol=1e-13)
