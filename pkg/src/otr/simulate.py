"""Generative settings and Monte Carlo study harness.

Outcomes follow ``Y = exp(x'eta) + A x'beta + eps`` with ``x = (1, x1, x2, x3)``,
``eta = (-1, -0.5, 0.5, -0.5)`` and standard normal noise. The settings
differ in the treatment-effect vector ``beta`` and in how ``x1`` is drawn:

====  =====================  =======================
s1    (-2, -2, 2, 2)         x1 ~ N(0, 1)
s2    (-2, -2, 2, 0)         x1 ~ N(0, 1)
s3    (1, 2, 0.02, 0)        x1 ~ N(0, 1)
s4    (-1, 1, 0, 0)          x1 uniform on {-1, 0, 1, 2}
s5    (-1, 1, 0, 0)          x1 uniform on {1, 2}
====  =====================  =======================

``binary`` draws ``Y ~ Bernoulli(expit(x'eta + A x'beta))``; ``observational``
assigns treatment with ``P(A=1|x) = expit(x'(0.2, 0.5, 0.5, 0.5))``; ``local``
perturbs the normalized ``beta`` by ``b_n s`` with ``b_n = (n h_n)^(-1/2)``.
The last three borrow ``beta`` from ``base_setting`` (s1 by default).
"""

import csv
import io
import time
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.special import expit

from . import _rng
from ._parallel import pmap
from .data import Dataset
from .errors import NumericalError, ValidationError
from .inference import BootstrapConfig, run_bootstrap
from .kernels import GAUSSIAN_CDF, SmoothingKernel
from .objective import value_estimate
from .optimizer import ProximalConfig, estimate_regime, normalize_anchor
from .propensity import fit_logistic, predict_propensity

SETTINGS = ("s1", "s2", "s3", "s4", "s5", "binary", "observational", "local")
ETA = np.array([-1.0, -0.5, 0.5, -0.5])
ETA_OBS = np.array([0.2, 0.5, 0.5, 0.5])
BETA = {
    "s1": np.array([-2.0, -2.0, 2.0, 2.0]),
    "s2": np.array([-2.0, -2.0, 2.0, 0.0]),
    "s3": np.array([1.0, 2.0, 0.02, 0.0]),
    "s4": np.array([-1.0, 1.0, 0.0, 0.0]),
    "s5": np.array([-1.0, 1.0, 0.0, 0.0]),
}
X1_SUPPORT = {"s4": np.array([-1.0, 0.0, 1.0, 2.0]), "s5": np.array([1.0, 2.0])}
ANCHOR = 1
COLUMNS = ("intercept", "x1", "x2", "x3")
MAX_FAILED_FRACTION = 0.05
TRUTH_DRAWS = 10**6


@dataclass(frozen=True)
class SimulationSpec:
    setting: str = "s1"
    n: int = 300
    replicates: int = 100
    bootstrap: BootstrapConfig = None
    kernel: SmoothingKernel = GAUSSIAN_CDF
    seed: int = 0
    local_s: tuple = (1.0, 0.0, 1.0, 1.0)
    eval_sample_size: int = 10000
    base_setting: str = "s1"
    truth_draws: int = TRUTH_DRAWS
    prox: ProximalConfig = field(default_factory=ProximalConfig)

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise ValidationError(f"unknown setting {self.setting!r}; choose from {SETTINGS}",
                                  module="simulate")
        if self.base_setting not in BETA:
            raise ValidationError(f"base setting must be one of {tuple(BETA)}", module="simulate")
        if int(self.n) < 2:
            raise ValidationError("n must be at least 2", module="simulate")
        if int(self.replicates) < 1:
            raise ValidationError("replicates must be at least 1", module="simulate")
        s = tuple(float(v) for v in self.local_s)
        if len(s) != 4 or s[ANCHOR] != 0.0:
            raise ValidationError("local_s must have 4 entries with a zero anchor entry",
                                  module="simulate")
        object.__setattr__(self, "local_s", s)

    @property
    def covariate_setting(self):
        return self.setting if self.setting in X1_SUPPORT else "s1"

    def generative_beta(self):
        """Treatment-effect coefficients used to generate outcomes."""
        if self.setting in BETA:
            return BETA[self.setting].copy()
        base = BETA[self.base_setting]
        if self.setting == "local":
            b0 = base / abs(base[ANCHOR])
            return b0 + self.local_bn() * np.array(self.local_s)
        return base.copy()

    def local_bn(self):
        """``(n h_n)^(-1/2)`` with the population rule-of-thumb ``h_n``."""
        b0 = BETA[self.base_setting] / abs(BETA[self.base_setting][ANCHOR])
        sd = float(np.linalg.norm(b0[1:]))
        # for a normal index IQR/1.34 = 1.0067 sd, so the min is the sd
        h = 0.9 * self.n ** float(self.kernel.bandwidth_exponent) * sd
        return (self.n * h) ** -0.5

    def true_beta_opt(self):
        return normalize_anchor(self.generative_beta(), ANCHOR)

    def to_dict(self):
        return {
            "setting": self.setting, "n": int(self.n), "replicates": int(self.replicates),
            "bootstrap": None if self.bootstrap is None else self.bootstrap.to_dict(),
            "kernel": self.kernel.to_dict(), "seed": int(self.seed),
            "local_s": list(self.local_s), "eval_sample_size": int(self.eval_sample_size),
            "base_setting": self.base_setting, "truth_draws": int(self.truth_draws),
            "prox": {"alpha0": self.prox.alpha0, "gamma": self.prox.gamma,
                     "max_iterations": self.prox.max_iterations,
                     "step_tolerance": self.prox.step_tolerance, "mode": self.prox.mode},
        }


def draw_covariates(spec, m, rng):
    X = np.empty((m, 4))
    X[:, 0] = 1.0
    X[:, 1:] = rng.standard_normal((m, 3))
    support = X1_SUPPORT.get(spec.covariate_setting)
    if support is not None:
        X[:, 1] = rng.choice(support, size=m)
    return X


def _mean_outcome(spec, X, d):
    beta = spec.generative_beta()
    if spec.setting == "binary":
        return expit(X @ ETA + d * (X @ beta))
    return np.exp(X @ ETA) + d * (X @ beta)


def generate_dataset(spec, rng):
    """Draw one sample of size ``spec.n``.

    Returns
    -------
    data : Dataset
    true_beta_opt : ndarray
        Anchor-normalized coefficients of the optimal rule.
    """
    n = int(spec.n)
    X = draw_covariates(spec, n, rng)
    if spec.setting == "observational":
        A = (rng.random(n) < expit(X @ ETA_OBS)).astype(float)
    else:
        A = rng.integers(0, 2, size=n).astype(float)
    mean = _mean_outcome(spec, X, A)
    if spec.setting == "binary":
        Y = (rng.random(n) < mean).astype(float)
    else:
        Y = mean + rng.standard_normal(n)
    return Dataset(X, A, Y, COLUMNS, ANCHOR, True), spec.true_beta_opt()


def true_value_monte_carlo(spec, beta, draws=TRUTH_DRAWS, rng=None, policy="rule"):
    """Monte Carlo mean potential outcome under a policy.

    ``policy="rule"`` follows ``I(x'beta > 0)``; ``policy="random"`` treats
    each unit with probability one half (``beta`` is ignored).
    """
    if draws < 10**4:
        raise ValidationError("use at least 1e4 draws for a true value", module="simulate")
    rng = _rng.stream(spec.seed, _rng.TRUTH) if rng is None else rng
    total, done = 0.0, 0
    while done < draws:
        m = min(200_000, draws - done)
        X = draw_covariates(spec, m, rng)
        if policy == "random":
            y = 0.5 * (_mean_outcome(spec, X, 1.0) + _mean_outcome(spec, X, 0.0))
        else:
            d = (X @ np.asarray(beta, dtype=float) > 0).astype(float)
            y = _mean_outcome(spec, X, d)
        total += y.sum()
        done += m
    return total / draws


def match_ratio(beta_hat, beta_true, spec, rng):
    """Fraction of fresh covariate draws on which the two rules agree."""
    X = draw_covariates(spec, int(spec.eval_sample_size), rng)
    return float(np.mean((X @ np.asarray(beta_hat) > 0) == (X @ np.asarray(beta_true) > 0)))


def nonregular_mass(spec, draws, rng):
    """Share of covariate draws on the generative boundary ``x'beta = 0``."""
    X = draw_covariates(spec, draws, rng)
    return float(np.mean(np.abs(X @ spec.generative_beta()) < 1e-12))


@dataclass
class StudyMetrics:
    setting: str
    n: int
    replicates: int
    failed: int
    true_beta: np.ndarray
    true_value: float
    random_value: float
    bias: np.ndarray
    sd: np.ndarray
    match_ratio: float
    value_bias: float
    value_sd: float
    coverage: np.ndarray = None
    avg_length: np.ndarray = None
    value_coverage: float = None
    value_avg_length: float = None
    random_policy_coverage: float = None
    wall_time: float = 0.0
    config: dict = None

    @property
    def sd_defined(self):
        return self.replicates >= 2

    def to_dict(self):
        """JSON-ready dict; wall time is left out so reruns are byte-identical."""
        def arr(a):
            return None if a is None else [None if not np.isfinite(v) else float(v) for v in a]

        def num(v):
            return None if v is None or not np.isfinite(v) else float(v)

        return {
            "setting": self.setting, "n": self.n, "replicates": self.replicates,
            "failed": self.failed, "true_beta": arr(self.true_beta),
            "true_value": num(self.true_value), "random_value": num(self.random_value),
            "bias": arr(self.bias), "sd": arr(self.sd), "sd_defined": self.sd_defined,
            "match_ratio": num(self.match_ratio), "value_bias": num(self.value_bias),
            "value_sd": num(self.value_sd), "coverage": arr(self.coverage),
            "avg_length": arr(self.avg_length), "value_coverage": num(self.value_coverage),
            "value_avg_length": num(self.value_avg_length),
            "random_policy_coverage": num(self.random_policy_coverage),
            "config": self.config,
        }

    def csv_row(self):
        names = COLUMNS
        head = ["setting", "n", "replicates", "failed"]
        head += [f"bias_{c}" for c in names] + [f"sd_{c}" for c in names]
        head += ["match_ratio", "value_bias", "value_sd"]
        head += [f"coverage_{c}" for c in names] + [f"length_{c}" for c in names]
        head += ["value_coverage", "value_length", "random_policy_coverage", "wall_time"]

        def cells(a):
            return [""] * len(names) if a is None else [f"{v:.6g}" for v in a]

        def cell(v):
            return "" if v is None else f"{v:.6g}"

        row = [self.setting, str(self.n), str(self.replicates), str(self.failed)]
        row += cells(self.bias) + cells(self.sd)
        row += [cell(self.match_ratio), cell(self.value_bias), cell(self.value_sd)]
        row += cells(self.coverage) + cells(self.avg_length)
        row += [cell(self.value_coverage), cell(self.value_avg_length),
                cell(self.random_policy_coverage), f"{self.wall_time:.3f}"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(head)
        w.writerow(row)
        return buf.getvalue()


def _truths(spec):
    rng = _rng.stream(spec.seed, _rng.TRUTH)
    beta_opt = spec.true_beta_opt()
    v_opt = true_value_monte_carlo(spec, beta_opt, spec.truth_draws, rng)
    v_rand = true_value_monte_carlo(spec, None, spec.truth_draws, rng, policy="random")
    return beta_opt, v_opt, v_rand


def _fit_propensity(spec, data):
    if spec.setting != "observational":
        return None
    model = fit_logistic(data.covariates, data.treatment)
    return predict_propensity(model, data.covariates)


def _one_replicate(k, spec, beta_opt, v_opt, v_rand, with_bootstrap):
    data, _ = generate_dataset(spec, _rng.stream(spec.seed, _rng.DATA, k))
    try:
        pi = _fit_propensity(spec, data)
        if with_bootstrap:
            boot_seed = int(_rng.stream(spec.seed, _rng.BOOT, k).integers(2**63))
            bcfg = BootstrapConfig(spec.bootstrap.replicates_B, spec.bootstrap.weight_family,
                                   spec.bootstrap.alpha_level, boot_seed)
            res = run_bootstrap(data, spec.kernel, spec.prox, bcfg, pi)
            est = res.base_estimate
        else:
            est = estimate_regime(data, spec.kernel, spec.prox, pi)
    except (NumericalError, ValidationError):
        return None
    out = {
        "beta": est.beta,
        "match": match_ratio(est.beta, beta_opt, spec, _rng.stream(spec.seed, _rng.EVAL, k)),
        "value": value_estimate(data, est.beta, propensity=pi),
    }
    if with_bootstrap:
        ci = res.coefficient_ci
        lo, hi = res.value_ci
        out["covered"] = (ci[:, 0] <= beta_opt) & (beta_opt <= ci[:, 1])
        out["length"] = ci[:, 1] - ci[:, 0]
        out["value_covered"] = lo <= v_opt <= hi
        out["random_covered"] = lo <= v_rand <= hi
        out["value_length"] = hi - lo
    return out


def _sd(a):
    a = np.asarray(a, dtype=float)
    if a.shape[0] < 2:
        return np.full(a.shape[1:], np.nan) if a.ndim > 1 else np.nan
    return np.std(a, axis=0, ddof=1)


def _study(spec, with_bootstrap, threads):
    t0 = time.perf_counter()
    beta_opt, v_opt, v_rand = _truths(spec)
    task = partial(_one_replicate, spec=spec, beta_opt=beta_opt, v_opt=v_opt, v_rand=v_rand,
                   with_bootstrap=with_bootstrap)
    out = pmap(task, range(int(spec.replicates)), threads)
    ok = [o for o in out if o is not None]
    failed = len(out) - len(ok)
    if failed > MAX_FAILED_FRACTION * len(out):
        raise NumericalError(f"{failed} of {len(out)} study replicates failed (limit 5%)",
                             module="simulate")
    B = np.array([o["beta"] for o in ok])
    V = np.array([o["value"] for o in ok])
    m = StudyMetrics(
        setting=spec.setting, n=int(spec.n), replicates=len(ok), failed=failed,
        true_beta=beta_opt, true_value=v_opt, random_value=v_rand,
        bias=B.mean(axis=0) - beta_opt, sd=_sd(B),
        match_ratio=float(np.mean([o["match"] for o in ok])),
        value_bias=float(V.mean() - v_opt), value_sd=float(_sd(V)),
        config=spec.to_dict(),
    )
    if with_bootstrap:
        m.coverage = np.mean([o["covered"] for o in ok], axis=0)
        m.avg_length = np.mean([o["length"] for o in ok], axis=0)
        m.value_coverage = float(np.mean([o["value_covered"] for o in ok]))
        m.value_avg_length = float(np.mean([o["value_length"] for o in ok]))
        m.random_policy_coverage = float(np.mean([o["random_covered"] for o in ok]))
    m.wall_time = time.perf_counter() - t0
    return m


def run_estimation_study(spec, threads=1):
    """Bias, SD, match ratio and value error of the smoothed estimator over replicates."""
    return _study(spec, False, threads)


def run_coverage_study(spec, threads=1):
    """Estimation metrics plus bootstrap interval coverage and length."""
    if spec.bootstrap is None:
        raise ValidationError("coverage study needs a bootstrap configuration",
                              module="simulate")
    return _study(spec, True, threads)
