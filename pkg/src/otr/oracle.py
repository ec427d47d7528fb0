"""Exact maximization of the nonsmooth objective on small samples.

``M_n(beta)`` depends on ``beta`` only through the treated set
``{i : x_i'beta > 0}``, which is constant on the open cells of the central
hyperplane arrangement ``{beta : x_i'beta = 0}``. Every cell has an extreme
ray cut out by ``p - 1`` of the hyperplanes; perturbing that ray off each
of its hyperplanes in all ``2^(p-1)`` sign combinations visits every
adjacent cell. Enumerating all ``(p-1)``-subsets of the sample, both ray
orientations and all sign combinations therefore reaches every treated set
that some ``beta`` realizes.
"""

from dataclasses import dataclass
from itertools import combinations, product
from math import comb

import numpy as np
from scipy.optimize import linprog

from .data import validate_for_estimation
from .errors import ValidationError
from .objective import ANCHOR_EPS, clip_propensity

_TIE = 1e-12
_MAX_TIED = 64


@dataclass(frozen=True)
class OracleLimits:
    max_n: int = 500
    max_p: int = 3
    budget: float = 1e9

    def work(self, n, p):
        """Elementary operations of the enumeration."""
        return comb(n, p - 1) * 2 ** p * n


def _subset_chunks(n, k, size):
    it = combinations(range(n), k)
    while True:
        chunk = []
        for s in it:
            chunk.append(s)
            if len(chunk) == size:
                break
        if not chunk:
            return
        yield np.array(chunk, dtype=int).reshape(len(chunk), k)


def _rays(X, subsets):
    """Null vectors of each ``X[S]`` and the pseudo-inverses of ``X[S]``."""
    m, k = subsets.shape
    p = X.shape[1]
    if k == 0:
        return np.ones((1, 1)), np.zeros((1, 1, 0)), np.ones(1, dtype=bool)
    XS = X[subsets]                      # (m, k, p)
    _, sv, vt = np.linalg.svd(XS, full_matrices=True)
    scale = np.maximum(sv[:, 0], 1e-300)
    ok = sv[:, -1] > 1e-10 * scale       # rank k
    rays = vt[:, -1, :]                  # (m, p)
    pinv = np.linalg.pinv(XS)            # (m, p, k)
    return rays, pinv, ok


def _patterns(X, subsets, tol):
    rays, pinv, ok = _rays(X, subsets)
    rays, pinv = rays[ok], pinv[ok]
    if len(rays) == 0:
        return np.zeros((X.shape[0], 0), dtype=bool)
    k = subsets.shape[1]
    xr = X @ rays.T                                  # (n, m)
    rowscale = np.abs(X).sum(axis=1, keepdims=True)
    zero = np.abs(xr) <= tol * rowscale
    out = []
    for orient in (1.0, -1.0):
        pos = (orient * xr > tol * rowscale)
        for sigma in product((1.0, -1.0), repeat=k):
            v = pinv @ np.array(sigma)               # (m, p)
            xv = X @ v.T
            out.append(pos | (zero & (xv > tol * rowscale)))
    return np.concatenate(out, axis=1)


def _representative(X, pattern, anchor):
    """Interior point of the cell realizing ``pattern``, anchor-normalized."""
    n, p = X.shape
    sgn = np.where(pattern, -1.0, 1.0)
    # maximize t s.t. x_i'b >= t (treated), x_i'b <= -t (untreated), |b| <= 1
    A_ub = np.column_stack([sgn[:, None] * X, np.ones(n)])
    res = linprog(np.r_[np.zeros(p), -1.0], A_ub=A_ub, b_ub=np.zeros(n),
                  bounds=[(-1, 1)] * p + [(None, 1)], method="highs")
    if res.status != 0 or -res.fun <= 1e-12:
        return None
    b, t = res.x[:p], res.x[p]
    if abs(b[anchor]) <= ANCHOR_EPS:
        col = np.abs(X[:, anchor]).max()
        b = b.copy()
        b[anchor] += 0.5 * t / max(col, 1e-300)
    return b / abs(b[anchor])


def exact_nonsmooth_argmax(data, limits=None):
    """Global maximizer of ``M_n`` over all of R^p by cell enumeration.

    Returns
    -------
    beta : ndarray
        A point inside the optimal cell with ``|beta[anchor]| = 1``. If the
        best treated set is empty and no ``beta`` other than zero realizes
        it, the zero vector is returned.
    value : float
        ``max M_n``.
    """
    limits = OracleLimits() if limits is None else limits
    validate_for_estimation(data)
    X = data.covariates
    n, p = X.shape
    if n > limits.max_n or p > limits.max_p:
        raise ValidationError(
            f"oracle limited to n <= {limits.max_n}, p <= {limits.max_p}; got n={n}, p={p}",
            module="oracle")
    work = limits.work(n, p)
    if work > limits.budget:
        raise ValidationError(f"oracle budget exceeded: {work:.3g} > {limits.budget:.3g}",
                              module="oracle")
    s = 2.0 / n * (2.0 * data.treatment - 1.0) * data.outcome
    tol = 1e-12

    # the empty treated set (beta = 0) and coordinate-axis rules
    base = [np.zeros(n, dtype=bool)]
    for j in range(p):
        base += [X[:, j] > 0, X[:, j] < 0]
    cands = [np.column_stack(base)]
    chunk = max(1, int(2e6 // (n * 2 ** p)))
    for subsets in _subset_chunks(n, p - 1, chunk):
        cands.append(_patterns(X, subsets, tol))

    best, tied = -np.inf, {}
    for P in cands:
        vals = s @ P
        top = vals.max()
        if top > best + _TIE:
            best, tied = top, {}
        if top >= best - _TIE:
            for col in np.flatnonzero(vals >= best - _TIE):
                if len(tied) >= _MAX_TIED:
                    break
                pat = P[:, col]
                tied.setdefault(pat.tobytes(), pat)
    best = float(best)

    reps = []
    for pat in tied.values():
        b = _representative(X, pat, data.anchor_index)
        if b is not None:
            reps.append(b)
    if not reps:
        return np.zeros(p), best
    reps.sort(key=tuple)
    return reps[0], best


def constant_policy_values(data, propensity=None):
    """Sample values of treat-all, treat-none and the 50/50 randomized policy."""
    A, Y, n = data.treatment, data.outcome, data.n
    if propensity is None:
        w1 = np.full(n, 0.5)
        w0 = np.full(n, 0.5)
    else:
        pi = clip_propensity(np.asarray(propensity, dtype=float))
        w1, w0 = pi, 1.0 - pi
    treat_all = float(np.sum(A * Y / w1) / n)
    treat_none = float(np.sum((1 - A) * Y / w0) / n)
    return treat_all, treat_none, 0.5 * (treat_all + treat_none)
