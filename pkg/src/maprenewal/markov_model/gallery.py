"""Named reference models.

=========================  ==================================================
``iid``                    single state, one increment law (i.i.d. walk)
``two_state``              2-state chain, increments depend on the transition
``doeblin_k_state``        k-state chain with a strictly positive matrix
``ar1_gaussian``           continuous-state AR(1) in R^d (simulation only)
``lattice_negative_control``  simple random walk on Z^d (lattice by design)
=========================  ==================================================
"""

from __future__ import annotations

import numpy as np

from ..errors import UnknownModel
from .ar import ContinuousARModel
from .laws import FiniteMixture, Gaussian, IncrementLaw, PointMass
from .process import MarkovAdditiveProcess, center, make_map


def iid(law: IncrementLaw | None = None, d: int = 3, cov=None) -> MarkovAdditiveProcess:
    if law is None:
        law = Gaussian(np.zeros(d), np.eye(d) if cov is None else cov)
    return make_map([[1.0]], [[law]], law.dim, name="iid")


def two_state(p: float = 0.3, q: float | None = None, increments=None, d: int = 3):
    """``P = [[1-p, p], [q, 1-q]]``.

    The default increments make the walk drift along ``+v`` while in state 0
    and along ``-v`` in state 1, so steps are positively autocorrelated.
    """
    q = p if q is None else q
    P = [[1.0 - p, p], [q, 1.0 - q]]
    if increments is None:
        v = np.zeros(d)
        v[:3] = [0.8, 0.4, -0.2][: min(d, 3)]
        cov = 0.5 * np.eye(d)
        up, down = Gaussian(v, cov), Gaussian(-v, cov)
        increments = [[up, down], [up, down]]
    m = make_map(P, increments, name="two_state")
    return m


def doeblin_k_state(k: int = 3, d: int = 3, seed: int = 0, scale: float = 0.6,
                    doeblin: float = 0.6, centered: bool = True):
    """Random ``k``-state model with ``P >= doeblin / k`` entrywise.

    The uniform floor makes every row share mass ``doeblin``, which bounds
    the subdominant eigenvalue modulus by ``1 - doeblin``.
    """
    gen = np.random.default_rng(seed)
    rows = gen.dirichlet(np.ones(k), size=k)
    P = doeblin / k + (1.0 - doeblin) * rows
    P /= P.sum(axis=1, keepdims=True)
    incs = []
    for x in range(k):
        row = []
        for y in range(k):
            mean = scale * gen.normal(0.0, 0.7, size=d)
            G = gen.normal(size=(d, d))
            cov = scale**2 * (0.6 * np.eye(d) + 0.4 * (G @ G.T) / d)
            row.append(Gaussian(mean, cov))
        incs.append(row)
    m = make_map(P, incs, name="doeblin_k_state")
    return center(m) if centered else m


def ar1_gaussian(A=None, noise_cov=None, noise_mean=None, d: int = 3) -> ContinuousARModel:
    A = 0.5 * np.eye(d) if A is None else np.asarray(A, dtype=float)
    d = A.shape[0]
    cov = np.eye(d) if noise_cov is None else noise_cov
    mean = np.zeros(d) if noise_mean is None else noise_mean
    return ContinuousARModel(A, Gaussian(mean, cov))


def lattice_negative_control(d: int = 3) -> MarkovAdditiveProcess:
    """Simple random walk: steps ``+-e_i`` with probability ``1/(2d)`` each."""
    comps = []
    for i in range(d):
        for sgn in (1.0, -1.0):
            v = np.zeros(d)
            v[i] = sgn
            comps.append(PointMass(v))
    law = FiniteMixture(np.full(2 * d, 1.0 / (2 * d)), tuple(comps))
    m = make_map([[1.0]], [[law]], d, name="lattice_negative_control")
    return m


_GALLERY = {
    "iid": iid,
    "two_state": two_state,
    "doeblin_k_state": doeblin_k_state,
    "ar1_gaussian": ar1_gaussian,
    "lattice_negative_control": lattice_negative_control,
}

_ALIASES = {
    "iid_gaussian": "iid",
    "reference_3state": "doeblin_k_state",
}


def gallery_names() -> list[str]:
    return sorted(_GALLERY)


def gallery(name: str, **params):
    key = name.lower().replace("-", "_")
    key = _ALIASES.get(key, key)
    try:
        factory = _GALLERY[key]
    except KeyError:
        raise UnknownModel(f"unknown gallery model {name!r}; known: {gallery_names()}") from None
    return factory(**params)
