"""Value-search objectives for index rules ``I(x'beta > 0)``.

Randomized trials use the smoothed contrast

    M~(beta) = (2/n) sum_i r_i (2A_i - 1) K(x_i'beta / h) Y_i

and observational data the inverse-propensity weighted form

    (1/n) sum_i r_i [A_i K + (1 - A_i)(1 - K)] Y_i / pi_{A_i}(x_i).

Both are affine in ``K(x_i'beta/h)``, so the context stores per-unit contrast
coefficients ``c_i`` and a beta-free offset; with ``pi = 0.5`` the two forms
share ``c_i`` and differ only in the offset.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .kernels import SmoothingKernel
from .quantiles import empirical_quantile, iqr

PROPENSITY_CLIP = 1e-6
BANDWIDTH_FLOOR = 1e-6
ANCHOR_EPS = 1e-8


def _check_weights(w, n, name):
    if w is None:
        return None
    w = np.asarray(w, dtype=float).ravel()
    if w.shape != (n,):
        raise ValidationError(f"{name} has length {w.size}, expected {n}", module="objective")
    if not np.all(np.isfinite(w)):
        raise ValidationError(f"{name} contains non-finite values", module="objective")
    return w


def clip_propensity(pi):
    return np.clip(pi, PROPENSITY_CLIP, 1.0 - PROPENSITY_CLIP)


def arm_propensity(data, propensity):
    """``A_i pi_i + (1 - A_i)(1 - pi_i)``, or 0.5 throughout when ``propensity`` is None."""
    if propensity is None:
        return np.full(data.n, 0.5)
    pi = clip_propensity(propensity)
    A = data.treatment
    return A * pi + (1.0 - A) * (1.0 - pi)


@dataclass(frozen=True, eq=False)
class ObjectiveContext:
    """Everything the smoothed objective needs besides ``beta``.

    ``unit_weights`` are bootstrap weights (None means all ones);
    ``propensity`` switches to the inverse-propensity form (None means a
    randomized trial with ``P(A=1|x) = 0.5``).
    """

    data: object
    kernel: SmoothingKernel
    bandwidth_h: float
    unit_weights: np.ndarray = None
    propensity: np.ndarray = None
    contrast: np.ndarray = field(init=False, repr=False)
    offset: float = field(init=False, repr=False)
    scaled_x: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.data.n
        h = float(self.bandwidth_h)
        if not (np.isfinite(h) and h > 0):
            raise ValidationError(f"bandwidth must be positive, got {self.bandwidth_h}",
                                  module="objective")
        r = _check_weights(self.unit_weights, n, "unit_weights")
        if r is not None and np.any(r <= 0):
            raise ValidationError("unit_weights must be strictly positive", module="objective")
        pi = _check_weights(self.propensity, n, "propensity")
        if pi is not None:
            if np.any((pi <= 0) | (pi >= 1)):
                raise ValidationError("propensity values must lie in (0, 1)", module="objective")
            pi = clip_propensity(pi)
        A, Y = self.data.treatment, self.data.outcome
        rr = np.ones(n) if r is None else r
        if pi is None:
            c = (2.0 / n) * rr * (2.0 * A - 1.0) * Y
            off = 0.0
        else:
            denom = A * pi + (1.0 - A) * (1.0 - pi)
            base = rr * Y / denom / n
            c = (2.0 * A - 1.0) * base
            off = float(np.sum((1.0 - A) * base))
        object.__setattr__(self, "bandwidth_h", h)
        object.__setattr__(self, "unit_weights", r)
        object.__setattr__(self, "propensity", pi)
        object.__setattr__(self, "contrast", c)
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "scaled_x", self.data.covariates / h)

    def with_weights(self, unit_weights):
        return ObjectiveContext(self.data, self.kernel, self.bandwidth_h, unit_weights,
                                self.propensity)

    def _index(self, beta):
        beta = np.asarray(beta, dtype=float).ravel()
        if beta.shape != (self.data.p,):
            raise ValidationError(f"beta has length {beta.size}, expected {self.data.p}",
                                  module="objective")
        return self.scaled_x @ beta

    def value(self, beta):
        return float(self.contrast @ self.kernel.evaluate(self._index(beta))) + self.offset

    def gradient(self, beta):
        return (self.contrast * self.kernel.derivative1(self._index(beta))) @ self.scaled_x

    def hessian(self, beta):
        w = self.contrast * self.kernel.derivative2(self._index(beta))
        Xs = self.scaled_x
        H = (Xs * w[:, None]).T @ Xs
        return 0.5 * (H + H.T)


def smoothed_objective(ctx, beta):
    return ctx.value(beta)


def smoothed_gradient(ctx, beta):
    """Full p-vector gradient of :func:`smoothed_objective`."""
    return ctx.gradient(beta)


def smoothed_hessian(ctx, beta):
    return ctx.hessian(beta)


def _rule(data, beta):
    beta = np.asarray(beta, dtype=float).ravel()
    if beta.shape != (data.p,):
        raise ValidationError(f"beta has length {beta.size}, expected {data.p}", module="objective")
    # strict inequality: ties go to treatment 0
    return (data.covariates @ beta > 0).astype(float)


def nonsmooth_objective(data, beta):
    """``(2/n) sum (2A_i - 1) I(x_i'beta > 0) Y_i``."""
    d = _rule(data, beta)
    return float(2.0 / data.n * np.sum((2.0 * data.treatment - 1.0) * d * data.outcome))


def value_estimate(data, beta, unit_weights=None, propensity=None):
    """Inverse-probability weighted sample value of the rule indexed by ``beta``.

    In a randomized trial (``propensity`` None) this is
    ``(2/n) sum r_i {A_i I(x_i'beta > 0) + (1 - A_i) I(x_i'beta <= 0)} Y_i``.
    """
    d = _rule(data, beta)
    A = data.treatment
    r = _check_weights(unit_weights, data.n, "unit_weights")
    r = np.ones(data.n) if r is None else r
    follow = A * d + (1.0 - A) * (1.0 - d)
    return float(np.sum(r * follow * data.outcome / arm_propensity(data, propensity)) / data.n)


def pilot_direction(data, propensity=None):
    """Least-squares slope of the signed, inverse-propensity weighted outcome on x.

    The response is ``(2A_i - 1) Y_i / pi_{A_i}``, i.e. ``(2A_i - 1) 2 Y_i``
    in a randomized trial. The result is rescaled so the anchor coefficient
    has absolute value one whenever that coefficient is not negligible.
    """
    X = data.covariates
    target = (2.0 * data.treatment - 1.0) * data.outcome / arm_propensity(data, propensity)
    coef, *_ = np.linalg.lstsq(X, target, rcond=None)
    a = abs(coef[data.anchor_index])
    if a > ANCHOR_EPS:
        coef = coef / a
    return coef


def select_bandwidth(data, kernel, pilot):
    """Rule-of-thumb bandwidth ``0.9 n^e min(std(z), IQR(z)/1.34)`` with ``z = X pilot``.

    ``e`` is the kernel's bandwidth exponent. If the index is constant the
    anchor column's standard deviation is used instead of the min-term.
    """
    n = data.n
    z = data.covariates @ np.asarray(pilot, dtype=float)
    scale = n ** float(kernel.bandwidth_exponent)
    sd = float(np.std(z, ddof=1))
    if sd > 0:
        return max(0.9 * scale * min(sd, iqr(z) / 1.34), BANDWIDTH_FLOOR)
    sd_anchor = float(np.std(data.covariates[:, data.anchor_index], ddof=1))
    if sd_anchor <= 0:
        raise ValidationError("cannot select a bandwidth: index and anchor column are constant",
                              module="objective")
    return max(0.9 * scale * sd_anchor, BANDWIDTH_FLOOR)


__all__ = [
    "ObjectiveContext",
    "smoothed_objective",
    "smoothed_gradient",
    "smoothed_hessian",
    "nonsmooth_objective",
    "value_estimate",
    "pilot_direction",
    "select_bandwidth",
    "empirical_quantile",
]
