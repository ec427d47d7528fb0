"""Logistic propensity model ``P(A=1|x) = expit(x'xi)`` fitted by Newton's method."""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import NumericalError, ValidationError
from .objective import clip_propensity

SEPARATION_NORM = 50.0


@dataclass
class LogisticModel:
    xi: np.ndarray
    converged: bool
    iterations: int

    def to_dict(self):
        return {"xi": self.xi.tolist(), "converged": self.converged,
                "iterations": self.iterations}


def _loglik(X, A, xi):
    eta = X @ xi
    # log(1 + e^eta) computed stably
    return float(A @ eta - np.logaddexp(0.0, eta).sum())


def fit_logistic(X, A, max_iter=100, tol=1e-8):
    """Maximum-likelihood logistic regression.

    Newton steps on the observed information, halved while they lower the
    log-likelihood. Stops when the largest component of the mean score
    ``X'(A - mu)/n`` is below ``tol``.

    Raises
    ------
    ValidationError
        Single class, or rank-deficient design.
    NumericalError
        Coefficient norm beyond 50 (complete or quasi-complete separation),
        or no convergence within ``max_iter`` iterations.
    """
    X = np.asarray(X, dtype=float)
    A = np.asarray(A, dtype=float).ravel()
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if A.shape != (n,):
        raise ValidationError(f"treatment has length {A.size}, expected {n}", module="propensity")
    if A.min() == A.max():
        raise ValidationError("both treatment classes are needed to fit a propensity model",
                              module="propensity")
    if np.linalg.matrix_rank(X) < p:
        raise ValidationError("propensity design matrix is rank deficient", module="propensity")

    xi = np.zeros(p)
    ll = _loglik(X, A, xi)
    for it in range(1, max_iter + 1):
        mu = expit(X @ xi)
        score = X.T @ (A - mu)
        if np.max(np.abs(score)) < tol * n:
            return LogisticModel(xi, True, it - 1)
        info = (X * (mu * (1 - mu))[:, None]).T @ X
        try:
            step = np.linalg.solve(info, score)
        except np.linalg.LinAlgError:
            raise NumericalError("singular information matrix (separation?)",
                                 module="propensity") from None
        t = 1.0
        while True:
            cand = xi + t * step
            ll_new = _loglik(X, A, cand)
            if ll_new >= ll - 1e-12 or t < 1e-10:
                break
            t *= 0.5
        xi, ll = cand, ll_new
        if np.linalg.norm(xi) > SEPARATION_NORM:
            raise NumericalError(
                f"separation detected: |xi| = {np.linalg.norm(xi):.1f} exceeds {SEPARATION_NORM:g}",
                module="propensity")
    mu = expit(X @ xi)
    if np.max(np.abs(X.T @ (A - mu))) < tol * n:
        return LogisticModel(xi, True, max_iter)
    raise NumericalError(f"logistic fit did not converge in {max_iter} iterations",
                         module="propensity")


def predict_propensity(model, X):
    """``expit(X xi)`` clipped to ``(1e-6, 1 - 1e-6)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] != model.xi.size:
        raise ValidationError(f"design has {X.shape[1]} columns, model has {model.xi.size}",
                              module="propensity")
    if not model.converged:
        raise ValidationError("cannot predict from an unconverged model", module="propensity")
    return clip_propensity(expit(X @ model.xi))
