"""Smoothed robust estimation and weighted-bootstrap inference for optimal
linear treatment regimes ``I(x'beta > 0)``."""

from .data import Dataset, load_csv, validate_for_estimation
from .errors import NumericalError, OTRError, ValidationError
from .inference import (
    BootstrapConfig,
    BootstrapResult,
    bootstrap_replicates,
    coefficient_intervals,
    draw_weights,
    empirical_quantile,
    run_bootstrap,
    value_interval,
)
from .kernels import GAUSSIAN_CDF, POLYNOMIAL_7, SmoothingKernel, get_kernel
from .objective import (
    ObjectiveContext,
    nonsmooth_objective,
    pilot_direction,
    select_bandwidth,
    smoothed_gradient,
    smoothed_hessian,
    smoothed_objective,
    value_estimate,
)
from .optimizer import (
    ProximalConfig,
    RegimeEstimate,
    estimate_regime,
    normalize_anchor,
    proximal_maximize,
)
from .oracle import OracleLimits, constant_policy_values, exact_nonsmooth_argmax
from .propensity import LogisticModel, fit_logistic, predict_propensity
from .simulate import (
    SimulationSpec,
    StudyMetrics,
    generate_dataset,
    match_ratio,
    run_coverage_study,
    run_estimation_study,
    true_value_monte_carlo,
)

__version__ = "0.1.0"
