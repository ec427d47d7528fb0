"""Weighted-bootstrap confidence intervals for regime coefficients and the optimal value.

Each replicate multiplies unit ``i``'s contribution by an i.i.d. positive
weight ``r_i`` with mean one and variance one, refits the regime with the
base bandwidth, and evaluates the weighted sample value at the base
estimate. Intervals are basic (pivot) intervals: the bootstrap quantiles of
``estimate* - estimate`` are reflected about the point estimate.
"""

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import _rng
from ._parallel import pmap
from .errors import NumericalError, ValidationError
from .optimizer import ProximalConfig, RegimeEstimate, estimate_regime
from .objective import value_estimate
from .quantiles import empirical_quantile

WEIGHT_FAMILIES = ("exponential", "lognormal")
MAX_FAILED_FRACTION = 0.2
_LOGNORMAL_SIGMA2 = np.log(2.0)
_LOGNORMAL_MU = -0.5 * np.log(2.0)


@dataclass(frozen=True)
class BootstrapConfig:
    replicates_B: int = 500
    weight_family: str = "exponential"
    alpha_level: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if int(self.replicates_B) < 2:
            raise ValidationError(
                f"insufficient replicates: B={self.replicates_B}, need at least 2",
                module="inference")
        if self.weight_family not in WEIGHT_FAMILIES:
            raise ValidationError(
                f"weight family must be one of {WEIGHT_FAMILIES}, got {self.weight_family!r}",
                module="inference")
        if not 0 < self.alpha_level < 1:
            raise ValidationError("alpha level must lie in (0, 1)", module="inference")

    def to_dict(self):
        return {"B": int(self.replicates_B), "weights": self.weight_family,
                "alpha": self.alpha_level, "seed": int(self.seed)}


@dataclass
class BootstrapResult:
    """Replicate draws plus (once computed) the interval set.

    ``coefficient_draws`` holds anchor-normalized replicate estimates, one row
    per successful replicate; ``value_perturbations`` holds
    ``sqrt(n) (V*_n(beta_hat) - V_n(beta_hat))`` for the same replicates.
    """

    coefficient_draws: np.ndarray
    value_perturbations: np.ndarray
    base_estimate: RegimeEstimate
    n: int
    failed_replicates: int = 0
    coefficient_ci: np.ndarray = None
    value_ci: tuple = None
    alpha_level: float = None
    replicate_ids: np.ndarray = field(default=None, repr=False)

    def to_dict(self):
        out = {"failed": int(self.failed_replicates),
               "successful": int(len(self.value_perturbations))}
        if self.coefficient_ci is not None:
            out["coefficient_intervals"] = self.coefficient_ci.tolist()
        if self.value_ci is not None:
            out["value_interval"] = list(self.value_ci)
        return out


def draw_weights(n, family, rng):
    """``n`` i.i.d. positive weights with mean one and variance one.

    ``exponential`` is unit-rate exponential; ``lognormal`` has log-mean
    ``-ln(2)/2`` and log-variance ``ln(2)``.
    """
    if family == "exponential":
        return rng.standard_exponential(n)
    if family == "lognormal":
        return np.exp(_LOGNORMAL_MU + np.sqrt(_LOGNORMAL_SIGMA2) * rng.standard_normal(n))
    raise ValidationError(f"unknown weight family {family!r}", module="inference")


def _replicate(b, data, kernel, prox_config, family, seed, propensity, base_beta, h,
               base_value, unit):
    n = data.n
    r = np.ones(n) if unit else draw_weights(n, family, _rng.stream(seed, _rng.BOOT, b))
    try:
        est = estimate_regime(data, kernel, prox_config, propensity, r, bandwidth=h)
    except (NumericalError, ValidationError):
        return None
    v_star = value_estimate(data, base_beta, r, propensity)
    return est.beta, np.sqrt(n) * (v_star - base_value)


def bootstrap_replicates(data, kernel, prox_config, boot_config, propensity=None, base=None,
                         threads=1, _unit_weights=False):
    """Draw ``B`` weighted-bootstrap replicates around a base estimate.

    The base fit (computed here unless supplied) fixes the bandwidth used by
    every replicate. Replicates start from the same initial point as the base
    fit. Replicate ``b`` draws its weights from the stream ``(seed, b)``, so
    results do not depend on ``threads``.

    ``_unit_weights`` forces every weight to one (test hook).
    """
    prox_config = ProximalConfig() if prox_config is None else prox_config
    if base is None:
        base = estimate_regime(data, kernel, prox_config, propensity)
    base_value = value_estimate(data, base.beta, propensity=propensity)
    task = partial(_replicate, data=data, kernel=kernel, prox_config=prox_config,
                   family=boot_config.weight_family, seed=boot_config.seed,
                   propensity=propensity, base_beta=base.beta, h=base.bandwidth_h,
                   base_value=base_value, unit=_unit_weights)
    out = pmap(task, range(int(boot_config.replicates_B)), threads)
    ok = [i for i, o in enumerate(out) if o is not None]
    failed = len(out) - len(ok)
    if failed > MAX_FAILED_FRACTION * len(out):
        raise NumericalError(
            f"{failed} of {len(out)} bootstrap replicates failed to optimize (limit 20%)",
            module="inference")
    p = data.p
    draws = np.array([out[i][0] for i in ok]).reshape(len(ok), p)
    pert = np.array([out[i][1] for i in ok], dtype=float)
    return BootstrapResult(draws, pert, base, data.n, failed, replicate_ids=np.array(ok))


def coefficient_intervals(draws, base, h, alpha, n=None):
    """Pivot intervals for each coefficient.

    With ``xi_j = sqrt(n h) (beta*_j - beta_j)`` the interval is
    ``[beta_j - xi_j^(1-alpha/2) / sqrt(n h), beta_j - xi_j^(alpha/2) / sqrt(n h)]``.
    The anchor coefficient is reported as the point ``beta[anchor]``.

    Parameters
    ----------
    draws : ndarray, shape (m, p) or BootstrapResult
    base : RegimeEstimate
    h : float
    alpha : float
    n : int, optional
        Sample size; taken from ``draws`` when a BootstrapResult is passed.

    Returns
    -------
    ndarray, shape (p, 2)
    """
    if isinstance(draws, BootstrapResult):
        n = draws.n if n is None else n
        draws = draws.coefficient_draws
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 2 or draws.shape[0] < 2:
        raise ValidationError("insufficient replicates for coefficient intervals (need >= 2)",
                              module="inference")
    if n is None:
        raise ValidationError("sample size n is required", module="inference")
    beta = np.asarray(base.beta, dtype=float)
    scale = np.sqrt(n * h)
    out = np.empty((beta.size, 2))
    for j in range(beta.size):
        if j == base.anchor_index:
            out[j] = beta[j]
            continue
        xi = scale * (draws[:, j] - beta[j])
        q_lo, q_hi = empirical_quantile(xi, [alpha / 2, 1 - alpha / 2])
        out[j] = beta[j] - q_hi / scale, beta[j] - q_lo / scale
    return out


def value_interval(perturbations, base_value, n, alpha):
    """``[V_n - d^(1-alpha/2) / sqrt(n), V_n - d^(alpha/2) / sqrt(n)]``."""
    d = np.asarray(perturbations, dtype=float)
    if d.size < 2:
        raise ValidationError("insufficient replicates for the value interval (need >= 2)",
                              module="inference")
    q_lo, q_hi = empirical_quantile(d, [alpha / 2, 1 - alpha / 2])
    root_n = np.sqrt(n)
    return base_value - q_hi / root_n, base_value - q_lo / root_n


def run_bootstrap(data, kernel, prox_config=None, boot_config=None, propensity=None, threads=1,
                  base=None):
    """Base estimate, replicates and both interval types in one call."""
    boot_config = BootstrapConfig() if boot_config is None else boot_config
    res = bootstrap_replicates(data, kernel, prox_config, boot_config, propensity, base, threads)
    alpha = boot_config.alpha_level
    est = res.base_estimate
    res.coefficient_ci = coefficient_intervals(res, est, est.bandwidth_h, alpha)
    base_value = value_estimate(data, est.beta, propensity=propensity)
    res.value_ci = value_interval(res.value_perturbations, base_value, data.n, alpha)
    res.alpha_level = alpha
    return res
