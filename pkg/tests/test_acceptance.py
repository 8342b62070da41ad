"""Acceptance criteria, one test each, at their stated tolerances.

Every test records a ``[k/11] PASS|FAIL name: detail`` line, shown in the
terminal summary, before asserting.
"""

import math
import time

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from maprenewal.cli import main
from maprenewal.errors import SingularResolvent
from maprenewal.fourier_appendix import GaussianFunction, approximate_identity_check, riesz_identity_check
from maprenewal.markov_model import gallery, gallery_names, is_centered, mean_increment, nonlattice_diagnostic
from maprenewal.renewal import (
    Ball,
    FourierRenewal,
    TestFunctionH,
    asymptote,
    decay_check_J_K,
    i2_asymptotic_check,
    iid_gaussian_ball_sum,
    lattice_scan,
    renewal_sums_mc,
)
from maprenewal.spectral import (
    asymptotic_covariance,
    autocovariance_series,
    decomposition_residual,
    eigenprojection,
    gradient_lambda,
    lambda_quotient,
    perturbation_radius,
)

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]

TOTAL = 11
DIAG = np.ones(3) / math.sqrt(3.0)


def report(k: int, name: str, passed: bool, detail: str):
    line = f"[{k}/{TOTAL}] {'PASS' if passed else 'FAIL'} {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def _finite_models():
    out = []
    for name in gallery_names():
        m = gallery(name)
        if hasattr(m, "n_states"):
            out.append((name, m))
    return out


def _points_in_ball(d, radius, n, seed):
    gen = np.random.default_rng(seed)
    z = gen.standard_normal((n, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z * radius * gen.uniform(0.05, 1.0, size=(n, 1)) ** (1.0 / d)


@pytest.fixture(scope="module")
def markov_fourier():
    """Fourier route on the centred 3-state reference model, shared by three criteria."""
    m = gallery("doeblin_k_state")
    mu = m.stationary()
    f = np.ones(3)
    h = TestFunctionH(3, 2.0, 6)
    Sigma = asymptotic_covariance(m).Sigma
    t0 = time.perf_counter()
    eng = FourierRenewal(m, f, mu, h, Sigma=Sigma)
    a_list = [s * DIAG for s in (10.0, 20.0, 30.0, 40.0)]
    est = eng.estimates(a_list)
    return {"map": m, "mu": mu, "f": f, "h": h, "Sigma": Sigma, "engine": eng, "a": a_list,
            "estimates": est, "seconds": time.perf_counter() - t0}


def test_iid_ball_renewal_sum_matches_exact_series():
    m = gallery("iid")
    a_norms = (10.0, 15.0, 20.0)
    t0 = time.perf_counter()
    est = renewal_sums_mc(m, np.ones(1), np.ones(1), [s * DIAG for s in a_norms], Ball(1.0), 80_000,
                          seed=1, Sigma=np.eye(3))
    seconds = time.perf_counter() - t0
    z = [(e.value - iid_gaussian_ball_sum(3, 1.0, s)) / e.error for e, s in zip(est, a_norms)]
    ratio = est[-1].value / asymptote(3, np.eye(3), 1.0, 4.0 * math.pi / 3.0, 20.0 * DIAG)
    ok = all(abs(x) <= 3.0 for x in z) and 0.9 <= ratio <= 1.1 and seconds <= 120.0
    report(1, "iid ball renewal sum", ok,
           "z = " + ", ".join(f"{x:+.2f}" for x in z) + f"; ratio at 20 = {ratio:.4f}; {seconds:.0f} s")


def test_markov_renewal_routes_agree_and_approach_asymptote(markov_fourier):
    c = markov_fourier
    t0 = time.perf_counter()
    mc = renewal_sums_mc(c["map"], c["f"], c["mu"], c["a"][:3], c["h"], 16_384, seed=7, Sigma=c["Sigma"])
    seconds = time.perf_counter() - t0 + c["seconds"]
    four = c["estimates"][:3]
    gaps = [abs(x.value - y.value) / (x.error + y.error) for x, y in zip(four, mc)]
    asy = asymptote(3, c["Sigma"], 1.0, 1.0, c["a"][2])
    ratios = (four[-1].value / asy, mc[-1].value / asy)
    ok = max(gaps) <= 3.0 and all(0.85 <= r <= 1.15 for r in ratios) and seconds <= 600.0
    report(2, "markov renewal routes", ok,
           "gap/err = " + ", ".join(f"{g:.2f}" for g in gaps)
           + f"; ratio at 30 fourier {ratios[0]:.4f} mc {ratios[1]:.4f}; {seconds:.0f} s")


def test_spectral_decomposition_of_powers():
    worst, where = 0.0, ""
    for name, m in _finite_models():
        pts = _points_in_ball(m.d, 0.9 * perturbation_radius(m), 20, seed=11)
        r = max(decomposition_residual(m, t, 50) for t in pts)
        if r >= worst:
            worst, where = r, name
    report(3, "spectral decomposition", worst <= 1e-8, f"max residual {worst:.3g} ({where})")


def test_eigenvalue_two_routes_agree():
    worst, where = 0.0, ""
    for name, m in _finite_models():
        grid = _points_in_ball(m.d, 0.9 * perturbation_radius(m), 50, seed=12)
        diff = max(abs(eigenprojection(m, t).lam - lambda_quotient(m, t)) for t in grid)
        if diff >= worst:
            worst, where = diff, name
    report(4, "lambda two routes", worst <= 1e-8, f"max gap {worst:.3g} ({where})")


def test_covariance_hessian_moments_and_autocovariance():
    m = gallery("two_state")
    cov = asymptotic_covariance(m)
    auto = autocovariance_series(m, 400)
    auto_err = float(np.linalg.norm(cov.Sigma - auto) / np.linalg.norm(auto))
    ok = cov.moment_rel_err <= 0.02 and auto_err <= 1e-4
    report(5, "covariance", ok, f"moments rel {cov.moment_rel_err:.3g}; autocovariance rel {auto_err:.3g}")


def test_gradient_vanishes_iff_centred():
    centred = [gallery("iid"), gallery("two_state"), gallery("doeblin_k_state")]
    drifting = [gallery("doeblin_k_state", centered=False), gallery("two_state", p=0.2, q=0.4)]
    assert all(is_centered(m) for m in centred) and not any(is_centered(m) for m in drifting)
    c_err = max(float(np.max(np.abs(gradient_lambda(m)))) for m in centred)
    d_err = max(float(np.max(np.abs(gradient_lambda(m) - mean_increment(m)))) for m in drifting)
    report(6, "centering", c_err <= 1e-7 and d_err <= 1e-6,
           f"centred max |grad| {c_err:.3g}; drifting max |grad - drift| {d_err:.3g}")


def test_i2_matches_leading_prediction(markov_fourier):
    c = markov_fourier
    rows = [i2_asymptotic_check(c["Sigma"], c["h"], c["engine"].chi, [c["a"][3]])[0]]
    iid = FourierRenewal(gallery("iid"), h=c["h"])
    rows.append(i2_asymptotic_check(iid.Sigma, c["h"], iid.chi, [40.0 * DIAG])[0])
    worst = max(abs(r.ratio - 1.0) for r in rows)
    report(7, "I2 leading term", worst <= 0.05, "ratios at 40 = " + ", ".join(f"{r.ratio:.4f}" for r in rows))


def test_remainder_integrals_decay(markov_fourier):
    c = markov_fourier
    tables = {"doeblin_k_state": decay_check_J_K(c["map"], c["f"], c["mu"], c["h"], c["engine"].chi,
                                                 [c["a"][0], c["a"][3]], engine=c["engine"])}
    iid = FourierRenewal(gallery("iid"), h=c["h"])
    tables["iid"] = decay_check_J_K(iid.map, np.ones(1), np.ones(1), c["h"], iid.chi,
                                    [10.0 * DIAG, 40.0 * DIAG], engine=iid)
    drops = {k: (t.jk_drop, t.i13_drop) for k, t in tables.items()}
    ok = all(min(v) >= 3.0 for v in drops.values())
    report(8, "remainder decay", ok,
           "; ".join(f"{k} J+K {v[0]:.3g}x I1+I3 {v[1]:.3g}x" for k, v in drops.items()))


def test_riesz_pairing_and_approximate_identity():
    riesz = {d: riesz_identity_check(GaussianFunction(d))["rel_err"] for d in (3, 5)}
    table = approximate_identity_check(GaussianFunction(3, cov=np.diag([0.5, 1.0, 2.0]), normalized=True))
    dev = table.max_deviation(64)
    ok = max(riesz.values()) <= 1e-5 and dev <= 0.02 and table.strictly_decreasing()
    report(9, "Riesz pairing and approximate identity", ok,
           f"Riesz d=3 {riesz[3]:.3g}, d=5 {riesz[5]:.3g}; deviation at 64 {dev:.3g}; "
           f"decreasing {table.strictly_decreasing()}")


def test_lattice_control_is_flagged(tmp_path):
    m = gallery("lattice_negative_control")
    rep = nonlattice_diagnostic(m, [2 * math.pi * np.eye(3)[0], math.pi * np.ones(3)])
    flags = [bool(r >= 1.0 - rep.margin) for r in rep.radii]
    try:
        lattice_scan(m, 0.5, 6.5)
        scan = False
    except SingularResolvent:
        scan = True
    try:
        FourierRenewal(m, h=TestFunctionH(3, 6.5, 6))
        fourier = False
    except SingularResolvent:
        fourier = True
    code = main(["--gallery", "lattice_negative_control", "--suite", "renewal", "--out", str(tmp_path)])
    xfail = "XFAIL  negative_control:" in (tmp_path / "summary.txt").read_text()
    ok = all(flags) and scan and fourier and code == 0 and xfail
    report(10, "lattice negative control", ok,
           f"radius-1 flags {flags}; scan {scan}; Fourier SingularResolvent {fourier}; "
           f"CLI exit {code} XFAIL {xfail}")


def test_reruns_are_byte_identical(tmp_path):
    runs = {
        "spectral": ["--gallery", "two_state", "--suite", "spectral", "--seed", "3"],
        "renewal": ["--gallery", "iid", "--suite", "renewal", "--a-max", "20", "--n-traj", "2048", "--seed", "3"],
        "appendix": ["--gallery", "iid", "--suite", "appendix"],
    }
    same = {}
    for name, argv in runs.items():
        blobs = []
        for k in range(2):
            out = tmp_path / f"{name}{k}"
            main(argv + ["--out", str(out)])
            blobs.append((out / "results.json").read_bytes())
        same[name] = blobs[0] == blobs[1]
    report(11, "determinism", all(same.values()), ", ".join(f"{k} {v}" for k, v in same.items()))
