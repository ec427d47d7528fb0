"""Proximal gradient ascent on the smoothed objective and the estimation pipeline."""

from dataclasses import dataclass, field

import numpy as np

from .data import validate_for_estimation
from .errors import NumericalError, ValidationError
from .objective import (
    ANCHOR_EPS,
    ObjectiveContext,
    pilot_direction,
    select_bandwidth,
    value_estimate,
)

MODES = ("full-vector", "fixed-anchor")


@dataclass(frozen=True)
class ProximalConfig:
    """Settings for :func:`proximal_maximize`.

    ``alpha0`` is the initial curvature parameter, multiplied by ``gamma``
    before every step, so step lengths shrink geometrically. ``initial_beta``
    None means the zero vector (with the anchor set to +/-1 in fixed-anchor
    mode).
    """

    alpha0: float = 1.0
    gamma: float = 2.0
    max_iterations: int = 10000
    step_tolerance: float = 1e-10
    mode: str = "full-vector"
    initial_beta: tuple = None

    def __post_init__(self):
        if not (self.alpha0 > 0):
            raise ValidationError("alpha0 must be positive", module="optimizer")
        if not (self.gamma > 1):
            raise ValidationError("gamma must exceed 1", module="optimizer")
        if int(self.max_iterations) < 1:
            raise ValidationError("max_iterations must be at least 1", module="optimizer")
        if not (self.step_tolerance > 0):
            raise ValidationError("step_tolerance must be positive", module="optimizer")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}",
                                  module="optimizer")
        if self.initial_beta is not None:
            object.__setattr__(self, "initial_beta", tuple(float(b) for b in self.initial_beta))

    def start(self, p, anchor=None, sign=1.0):
        b = np.zeros(p) if self.initial_beta is None else np.array(self.initial_beta, dtype=float)
        if b.shape != (p,):
            raise ValidationError(f"initial_beta has length {b.size}, expected {p}",
                                  module="optimizer")
        if anchor is not None and self.initial_beta is None:
            b[anchor] = sign
        return b


@dataclass
class ProximalTrace:
    objective: list = field(default_factory=list)
    iterations: int = 0
    stop_reason: str = ""
    # whether the step that failed the sufficient-increase test was kept
    kept_final_step: bool = False

    @property
    def converged(self):
        return self.stop_reason in ("sufficient-increase", "step-tolerance")


@dataclass
class RegimeEstimate:
    beta_raw: np.ndarray
    beta: np.ndarray
    anchor_index: int
    bandwidth_h: float
    objective_value: float
    sample_value: float
    iterations: int
    converged: bool
    mode_used: str
    stop_reason: str = ""

    def to_dict(self):
        return {
            "beta": self.beta.tolist(),
            "beta_raw": self.beta_raw.tolist(),
            "anchor": self.anchor_index,
            "h": self.bandwidth_h,
            "objective": self.objective_value,
            "value": self.sample_value,
            "iterations": self.iterations,
            "converged": self.converged,
            "mode": self.mode_used,
        }


def proximal_maximize(ctx, config, beta0=None, fixed_index=None):
    """Maximize the smoothed objective by expanding-curvature proximal steps.

    Each pass sets ``alpha_t = gamma * alpha_{t-1}`` and moves by
    ``delta_t = grad / (2 alpha_t)``, which is the closed-form proximal step
    ``(n alpha_t)^-1 sum c_i K'(x_i'beta/h) x_i/h`` of the randomized form.
    The loop ends when the sufficient-increase quantity

        M(beta_t) - M(beta_{t-1}) - <grad, delta_t> + alpha_t |delta_t|^2

    turns negative, when ``|delta_t|`` drops below ``step_tolerance``, or
    after ``max_iterations`` passes. The step that fails the test is kept
    only if it does not lower the objective.

    Parameters
    ----------
    ctx : ObjectiveContext
    config : ProximalConfig
    beta0 : array_like, optional
        Starting point; defaults to ``config.start(p)``.
    fixed_index : int, optional
        Coordinate held fixed (fixed-anchor mode).

    Returns
    -------
    beta : ndarray
    trace : ProximalTrace
    """
    p = ctx.data.p
    beta = config.start(p) if beta0 is None else np.array(beta0, dtype=float)
    Xs, c, off, kern = ctx.scaled_x, ctx.contrast, ctx.offset, ctx.kernel

    u = Xs @ beta
    f = float(c @ kern.evaluate(u)) + off
    if not np.isfinite(f):
        raise NumericalError("non-finite objective at the starting point (iteration 0)",
                             module="optimizer")
    trace = ProximalTrace(objective=[f])
    alpha = float(config.alpha0)
    gamma = float(config.gamma)
    t = 0
    while t < config.max_iterations:
        t += 1
        alpha *= gamma
        with np.errstate(over="ignore", invalid="ignore"):
            grad = (c * kern.derivative1(u)) @ Xs
        delta = grad / (2.0 * alpha)
        if fixed_index is not None:
            delta[fixed_index] = 0.0
        new = beta + delta
        u_new = Xs @ new
        if not np.all(np.isfinite(u_new)):
            raise NumericalError(f"non-finite iterate at iteration {t}", module="optimizer")
        f_new = float(c @ kern.evaluate(u_new)) + off
        if not np.isfinite(f_new):
            raise NumericalError(f"non-finite objective at iteration {t}", module="optimizer")
        with np.errstate(over="ignore", invalid="ignore"):
            step2 = float(delta @ delta)
            diff = f_new - f - float(grad @ delta) + alpha * step2
        if not np.isfinite(diff):
            raise NumericalError(f"non-finite gradient step at iteration {t}", module="optimizer")
        if diff < 0:
            trace.stop_reason = "sufficient-increase"
            if f_new >= f:
                beta, f = new, f_new
                trace.objective.append(f)
                trace.kept_final_step = True
            break
        beta, u, f = new, u_new, f_new
        trace.objective.append(f)
        if np.sqrt(step2) < config.step_tolerance:
            trace.stop_reason = "step-tolerance"
            break
    else:
        trace.stop_reason = "max-iterations"
    trace.iterations = t
    return beta, trace


def normalize_anchor(beta, anchor_index, eps=ANCHOR_EPS):
    """Rescale so ``|beta[anchor_index]| == 1``, keeping its sign."""
    beta = np.asarray(beta, dtype=float)
    a = abs(beta[anchor_index])
    if not a > eps:
        raise ValidationError(
            f"degenerate anchor: |beta[{anchor_index}]| = {a:.3g} <= {eps:g}; "
            "use fixed-anchor mode", module="optimizer")
    out = beta / a
    out[anchor_index] = np.sign(beta[anchor_index])
    return out


def _fixed_anchor_race(ctx, config, anchor):
    best = None
    for sign in (1.0, -1.0):
        b0 = config.start(ctx.data.p, anchor, sign)
        if abs(b0[anchor]) <= ANCHOR_EPS:
            b0[anchor] = sign
        b, tr = proximal_maximize(ctx, config, b0, fixed_index=anchor)
        if best is None or tr.objective[-1] > best[1].objective[-1]:
            best = (b, tr)
    return best


def estimate_regime(data, kernel, config=None, propensity=None, unit_weights=None,
                    bandwidth=None):
    """Estimate the coefficient vector of the optimal index rule.

    Pipeline: pilot direction, rule-of-thumb bandwidth (unless ``bandwidth``
    is given), proximal ascent, anchor normalization, sample value. In
    full-vector mode a degenerate anchor triggers two fixed-anchor runs with
    the anchor at +1 and -1; the one with the larger objective is kept.

    Parameters
    ----------
    data : Dataset
    kernel : SmoothingKernel
    config : ProximalConfig, optional
    propensity : array_like, optional
        ``P(A=1|x_i)``; switches to the inverse-propensity objective.
    unit_weights : array_like, optional
        Positive per-unit weights (weighted bootstrap).
    bandwidth : float, optional
        Fixed bandwidth, bypassing selection.

    Returns
    -------
    RegimeEstimate
    """
    config = ProximalConfig() if config is None else config
    validate_for_estimation(data)
    anchor = data.anchor_index
    if bandwidth is None:
        bandwidth = select_bandwidth(data, kernel, pilot_direction(data, propensity))
    ctx = ObjectiveContext(data, kernel, bandwidth, unit_weights, propensity)

    mode = config.mode
    if mode == "full-vector":
        raw, tr = proximal_maximize(ctx, config)
        if abs(raw[anchor]) <= ANCHOR_EPS:
            mode = "fixed-anchor"
    if mode == "fixed-anchor":
        raw, tr = _fixed_anchor_race(ctx, config, anchor)
    beta = normalize_anchor(raw, anchor)
    return RegimeEstimate(
        beta_raw=raw,
        beta=beta,
        anchor_index=anchor,
        bandwidth_h=ctx.bandwidth_h,
        objective_value=tr.objective[-1],
        sample_value=value_estimate(data, beta, propensity=propensity),
        iterations=tr.iterations,
        converged=tr.converged,
        mode_used=mode,
        stop_reason=tr.stop_reason,
    )
