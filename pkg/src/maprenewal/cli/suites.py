"""Verification suites run by the command line tool.

Each suite returns records for ``results.json`` and one :class:`Outcome` per
named check.  ``XFAIL`` marks an expected failure (the lattice negative
control) and counts as success.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..errors import MapRenewalError, NotCentered, SingularResolvent, TailNotNegligible
from ..fourier_appendix import (
    BumpProduct,
    GaussianFunction,
    approximate_identity_check,
    riesz_identity_check,
)
from ..markov_model import ContinuousARModel, center, is_centered, mean_increment
from ..renewal import (
    FourierRenewal,
    TestFunctionH,
    asymptote,
    decay_check_J_K,
    estimate_record,
    i2_asymptotic_check,
    lattice_scan,
    renewal_sums_mc,
)
from ..spectral import (
    asymptotic_covariance,
    autocovariance_series,
    decomposition_residual,
    eigenprojection,
    gradient_lambda,
    lambda_quotient,
    perturbation_radius,
)
from ..spectral.decomposition import _ones

# lattice scan reach; must exceed the nearest dual point pi (1, ..., 1) in d = 3
NEGATIVE_CONTROL_B = 6.5


@dataclass(frozen=True)
class Outcome:
    name: str
    status: str  # PASS, FAIL, XFAIL or SKIP
    detail: str

    @property
    def ok(self) -> bool:
        return self.status in ("PASS", "XFAIL", "SKIP")


@dataclass
class SuiteResult:
    records: list = field(default_factory=list)
    outcomes: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)

    def check(self, name: str, passed: bool, detail: str):
        self.outcomes.append(Outcome(name, "PASS" if passed else "FAIL", detail))

    def extend(self, other: "SuiteResult"):
        self.records += other.records
        self.outcomes += other.outcomes
        self.tables.update(other.tables)


def _record(cfg, route: str, check: str, **values) -> dict:
    return {"model_id": cfg.model_id, "route": route, "check": check, **values,
            "config_hash": cfg.config_hash(), "version": __version__}


def _ball_points(d: int, radius: float, n: int, seed: int) -> np.ndarray:
    gen = np.random.default_rng(seed)
    z = gen.standard_normal((n, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z * radius * gen.uniform(0.05, 1.0, size=(n, 1)) ** (1.0 / d)


def spectral_suite(cfg) -> SuiteResult:
    res = SuiteResult()
    m, tol = cfg.model, cfg.tolerances
    if isinstance(m, ContinuousARModel):
        return _ar_suite(cfg)
    d = m.d

    lam0 = eigenprojection(m, np.zeros(d), tol=tol).lam
    res.records.append(_record(cfg, "spectral", "lambda_at_zero", value=lam0, threshold=1e-12))
    res.check("lambda_at_zero", abs(lam0 - 1.0) <= 1e-12, f"|lambda(0) - 1| = {abs(lam0 - 1.0):.3g}")

    radius = perturbation_radius(m, tol=tol)
    pts = _ball_points(d, 0.9 * radius, cfg.spectral_points, cfg.seed)
    worst = max(decomposition_residual(m, t, 50, tol) for t in pts)
    res.records.append(_record(cfg, "spectral", "decomposition", value=worst, threshold=1e-8,
                               perturbation_radius=radius, n_points=len(pts)))
    res.check("decomposition", worst <= 1e-8, f"max ||Q^n - lambda^n Pi - N^n|| = {worst:.3g}")

    grid = _ball_points(d, 0.9 * radius, cfg.lambda_points, cfg.seed + 1)
    diff = max(abs(eigenprojection(m, t, tol=tol).lam - lambda_quotient(m, t, tol=tol)) for t in grid)
    res.records.append(_record(cfg, "spectral", "lambda_two_routes", value=diff, threshold=1e-8))
    res.check("lambda_two_routes", diff <= 1e-8, f"max |lambda_trace - lambda_formula| = {diff:.3g}")

    drift = mean_increment(m)
    grad = gradient_lambda(m, tol=tol)
    if is_centered(m):
        err = float(np.max(np.abs(grad)))
        res.check("centering", err <= 1e-7, f"max |grad lambda(0)/i| = {err:.3g}")
    else:
        err = float(np.max(np.abs(grad - drift)))
        res.check("centering", err <= 1e-6, f"max |grad lambda(0)/i - drift| = {err:.3g}")
    res.records.append(_record(cfg, "spectral", "centering", value=err, gradient=grad, drift=drift))

    mc = m if is_centered(m) else center(m)
    cov = asymptotic_covariance(mc, tol=tol)
    auto = autocovariance_series(mc, 400)
    auto_err = float(np.linalg.norm(cov.Sigma - auto) / np.linalg.norm(auto))
    res.records.append(_record(cfg, "spectral", "covariance", value=cov.Sigma, moment_rel_err=cov.moment_rel_err,
                               autocov_rel_err=auto_err, centred_copy=not is_centered(m)))
    res.check("covariance_moments", cov.moment_rel_err <= 0.02,
              f"relative gap to E[S_n S_n^T]/n at n = 500: {cov.moment_rel_err:.3g}")
    res.check("covariance_autocovariance", auto_err <= 1e-4, f"relative gap to autocovariance series: {auto_err:.3g}")
    if mc.n_states == 1:
        ref = mc.law(0, 0).covariance()
        ref_err = float(np.max(np.abs(cov.Sigma - ref)))
        res.check("covariance_reference", ref_err <= 1e-6, f"max |Sigma - Cov(step)| = {ref_err:.3g}")

    try:
        rho = lattice_scan(m, 0.5, NEGATIVE_CONTROL_B, margin=tol.lattice_margin)
        flagged, detail = False, f"max spectral radius on the dual-lattice scan {rho:.12g}"
    except SingularResolvent as exc:
        flagged, detail = True, str(exc)
    res.records.append(_record(cfg, "spectral", "nonlattice", lattice_flag=flagged, detail=detail))
    _expectation(res, cfg, "nonlattice", flagged, detail)

    u = cfg.unit_direction()
    norms = np.linspace(0.0, 0.95 * radius, cfg.lambda_points)
    curve = [abs(eigenprojection(m, s * u, tol=tol).lam) for s in norms]
    res.records.append({"model_id": cfg.model_id, "route": "lambda_curve", "direction": u,
                        "norm_t": norms, "abs_lambda": curve,
                        "config_hash": cfg.config_hash(), "version": __version__})
    return res


def _expectation(res: SuiteResult, cfg, name: str, flagged: bool, detail: str):
    if cfg.expected == "lattice":
        status = "XFAIL" if flagged else "FAIL"
        detail = ("expected lattice failure: " + detail) if flagged else "lattice model was not flagged"
    else:
        status = "FAIL" if flagged else "PASS"
    res.outcomes.append(Outcome(name, status, detail))


def _ar_suite(cfg) -> SuiteResult:
    res = SuiteResult()
    m = cfg.model
    C = m.stationary_covariance()
    lyap = float(np.max(np.abs(C - m.A @ C @ m.A.T - m.noise.cov)))
    res.check("ar_lyapunov", lyap <= 1e-12, f"Lyapunov residual {lyap:.3g}")
    S = m.asymptotic_covariance()
    rel = float(np.linalg.norm(m.walk_covariance(500) / 500 - S) / np.linalg.norm(S))
    res.check("covariance_moments", rel <= 0.02, f"relative gap Cov(S_500)/500 vs limit: {rel:.3g}")
    res.records.append(_record(cfg, "spectral", "ar_covariance", value=S, lyapunov_residual=lyap,
                               moment_rel_err=rel))
    return res


def renewal_suite(cfg) -> SuiteResult:
    res = SuiteResult()
    m, tol = cfg.model, cfg.tolerances
    if isinstance(m, ContinuousARModel):
        res.outcomes.append(Outcome("renewal", "SKIP", "continuous-state model has no finite Fourier matrix"))
        return res
    d = m.d
    f = _ones(m.n_states)
    u = cfg.unit_direction()
    a_list = [s * u for s in cfg.shifts]

    if cfg.expected == "lattice":
        h = TestFunctionH(d, max(cfg.h_b, NEGATIVE_CONTROL_B), cfg.h_p)
        try:
            FourierRenewal(m, f, cfg.mu, h, tol=tol)
            flagged, detail = False, "Fourier route ran"
        except SingularResolvent as exc:
            flagged, detail = True, str(exc)
        res.records.append(_record(cfg, "fourier", "negative_control", status="XFAIL" if flagged else "FAIL",
                                   detail=detail))
        _expectation(res, cfg, "negative_control", flagged, detail)
        return res

    h = TestFunctionH(d, cfg.h_b, cfg.h_p)
    try:
        Sigma = asymptotic_covariance(m, tol=tol).Sigma
        eng = FourierRenewal(m, f, cfg.mu, h, Sigma=Sigma, tol=tol, rtol=cfg.cubature_rtol,
                             max_level=cfg.cubature_max_level, budget=cfg.cubature_budget)
        fourier = eng.estimates(a_list)
    except NotCentered as exc:
        res.outcomes.append(Outcome("renewal", "FAIL", f"renewal asymptotics need a centred model: {exc}"))
        return res
    except MapRenewalError as exc:
        res.records.append(_record(cfg, "fourier", "renewal", status="FAIL", detail=str(exc)))
        _expectation(res, cfg, "renewal", isinstance(exc, SingularResolvent), f"{type(exc).__name__}: {exc}")
        if not isinstance(exc, SingularResolvent):
            res.outcomes[-1] = Outcome("renewal", "FAIL", f"{type(exc).__name__}: {exc}")
        return res
    try:
        mc = renewal_sums_mc(m, f, cfg.mu, a_list, h, cfg.n_traj, seed=cfg.seed, Sigma=Sigma,
                             n_factor=cfg.n_factor)
    except TailNotNegligible as exc:
        res.outcomes.append(Outcome("mc_tail", "FAIL", str(exc)))
        mc = None

    L0 = float(np.asarray(cfg.mu) @ f)
    worst = 0.0
    for i, a in enumerate(a_list):
        asy = asymptote(d, Sigma, L0, h.integral, a)
        rec = estimate_record(fourier[i], cfg.model_id, cfg.config_hash())
        rec["asymptote"] = asy
        res.records.append(rec)
        if mc is not None:
            rec = estimate_record(mc[i], cfg.model_id, cfg.config_hash())
            rec["asymptote"] = asy
            res.records.append(rec)
            gap = abs(fourier[i].value - mc[i].value) / (fourier[i].error + mc[i].error)
            worst = max(worst, gap)
    if mc is not None:
        res.check("route_agreement", worst <= 3.0, f"max |fourier - mc| / combined error = {worst:.3g}")
    asy = asymptote(d, Sigma, L0, h.integral, a_list[-1])
    ratios = [fourier[-1].value / asy] + ([mc[-1].value / asy] if mc is not None else [])
    res.check("asymptote_ratio", all(0.85 <= r <= 1.15 for r in ratios),
              f"ratio at |a| = {cfg.shifts[-1]:g}: " + ", ".join(f"{r:.4f}" for r in ratios))

    i2 = i2_asymptotic_check(Sigma, h, eng.chi, [a_list[-1]], L0=L0)[0]
    res.records.append(_record(cfg, "fourier", "i2_asymptotic", value=i2.ratio, norm_a=i2.norm_a))
    res.check("i2_asymptotic", abs(i2.ratio - 1.0) <= 0.05, f"I2 / prediction at |a| = {i2.norm_a:g}: {i2.ratio:.4f}")

    if len(a_list) >= 2 and cfg.shifts[-1] / cfg.shifts[0] >= 4.0:
        table = decay_check_J_K(m, f, cfg.mu, h, eng.chi, a_list, engine=eng)
        res.records.append(_record(cfg, "fourier", "decay", norm_a=table.norm_a,
                                   jk_scaled=table.jk_scaled, i13_scaled=table.i13_scaled))
        res.check("decay_JK", table.jk_drop >= 3.0, f"|a|^(d-2)|J+K| drops {table.jk_drop:.3g}x")
        res.check("decay_I13", table.i13_drop >= 3.0, f"|a|^(d-2)|I1+I3| drops {table.i13_drop:.3g}x")
    else:
        res.outcomes.append(Outcome("decay", "SKIP", "needs shifts spanning a factor of 4"))
    return res


def appendix_suite(cfg) -> SuiteResult:
    res = SuiteResult()
    for d, g in ((3, GaussianFunction(3)), (5, GaussianFunction(5)), (3, BumpProduct(3, k=6))):
        out = riesz_identity_check(g, d)
        name = f"riesz_{type(g).__name__.lower()}_d{d}"
        res.records.append(_record(cfg, "appendix", name, value=out["rel_err"], lhs=out["lhs"], rhs=out["rhs"]))
        res.check(name, out["rel_err"] <= 1e-5, f"relative error {out['rel_err']:.3g}")
    F = GaussianFunction(3, cov=np.diag([0.5, 1.0, 2.0]), normalized=True)
    table = approximate_identity_check(F)
    top = table.betas[-1]
    dev = table.max_deviation(top)
    res.records.append(_record(cfg, "appendix", "approximate_identity", betas=table.betas,
                               max_deviation=[table.max_deviation(b) for b in table.betas]))
    res.check("approximate_identity", dev <= 0.02 and table.strictly_decreasing(),
              f"max deviation {dev:.3g} at beta = {top:g}; strictly decreasing: {table.strictly_decreasing()}")
    spread, mean = table.spread(top), table.mean_deviation(top)
    res.check("approximate_identity_uniformity", spread <= 2.0 * mean,
              f"spread {spread:.3g} vs mean {mean:.3g} at beta = {top:g}")
    res.tables["appendix.csv"] = table.to_csv()
    return res


SUITE_FUNCS = {"spectral": spectral_suite, "renewal": renewal_suite, "appendix": appendix_suite}


def run_suites(cfg) -> SuiteResult:
    names = ("spectral", "renewal", "appendix") if cfg.suite == "all" else (cfg.suite,)
    res = SuiteResult()
    for name in names:
        res.extend(SUITE_FUNCS[name](cfg))
    return res
