import numpy as np
import pytest

from maprenewal.markov_model import nonlattice_diagnostic, shell_grid


def test_shell_grid_radii():
    g = shell_grid(3, 0.5, 2.0, n_radii=4, n_dirs=10)
    r = np.linalg.norm(g, axis=1)
    assert r.min() == pytest.approx(0.5)
    assert r.max() == pytest.approx(2.0)


def test_lattice_model_flagged_at_dual_point(lattice):
    rep = nonlattice_diagnostic(lattice, [[0.5, 0.0, 0.0], [np.pi, np.pi, np.pi]])
    assert rep.lattice_suspect
    np.testing.assert_allclose(rep.worst_t, [np.pi] * 3)


def test_nonlattice_model_stays_below_one(doeblin):
    rep = nonlattice_diagnostic(doeblin, shell_grid(3, 0.5, 7.0, n_radii=5, n_dirs=20))
    assert not rep.lattice_suspect
    assert rep.max_radius < 0.99
    assert rep.to_dict()["n_grid"] == 5 * 26


def test_origin_excluded(doeblin):
    with pytest.raises(ValueError):
        nonlattice_diagnostic(doeblin, [[0.0, 0.0, 0.0]])
