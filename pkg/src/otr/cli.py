"""Command-line front end.

Subcommands ``estimate``, ``bootstrap`` and ``oracle`` read a CSV sample;
``simulate`` runs a Monte Carlo study. Results are JSON (numbers rounded to
12 significant digits) with the resolved configuration embedded. Exit status
is 0 on success, 1 on invalid input and 2 on numerical failure.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import __version__
from ._parallel import resolve_threads
from .data import load_csv
from .errors import NumericalError, OTRError, ValidationError
from .inference import BootstrapConfig, run_bootstrap
from .kernels import get_kernel
from .oracle import OracleLimits, exact_nonsmooth_argmax
from .optimizer import MODES, ProximalConfig, estimate_regime
from .propensity import fit_logistic, predict_propensity
from .simulate import SETTINGS, SimulationSpec, run_coverage_study, run_estimation_study

WEIGHT_ALIASES = {"exp": "exponential", "exponential": "exponential", "lognormal": "lognormal"}


def _round(obj):
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(f"{v:.12g}") if math.isfinite(v) else None
    return obj


def dumps(obj):
    return json.dumps(_round(obj), indent=2, sort_keys=True) + "\n"


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _add_optimizer_flags(p):
    p.add_argument("--kernel", default="gaussian", choices=["gaussian", "poly7"])
    p.add_argument("--mode", default="full-vector", choices=list(MODES))
    p.add_argument("--alpha0", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--tol", type=float, default=1e-10)


def _add_data_flags(p):
    p.add_argument("--csv", required=True, help="input sample with a header row")
    p.add_argument("--outcome", default="y")
    p.add_argument("--treatment", default="a")
    p.add_argument("--covariates", default=None,
                   help="comma-separated covariate columns (default: all others)")
    p.add_argument("--anchor", default=None, help="anchor column (default: first covariate)")
    p.add_argument("--no-intercept", action="store_true")
    p.add_argument("--observational", action="store_true",
                   help="fit a logistic propensity model and use the IPW objective")
    p.add_argument("--propensity-covariates", default=None,
                   help="comma-separated propensity model columns (default: all, with intercept)")


def _add_boot_flags(p):
    p.add_argument("--B", type=int, default=500)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--weights", default="exp", choices=sorted(WEIGHT_ALIASES))
    p.add_argument("--seed", type=int, default=0)


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input (exit 1); 2 is reserved for numerical failure
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    ap = _Parser(prog="otr", description="Smoothed estimation of linear "
                                 "treatment regimes with weighted-bootstrap inference.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="fit a regime to a CSV sample")
    _add_data_flags(est)
    _add_optimizer_flags(est)
    est.add_argument("--out", default=None)

    boot = sub.add_parser("bootstrap", help="estimate plus bootstrap intervals")
    _add_data_flags(boot)
    _add_optimizer_flags(boot)
    _add_boot_flags(boot)
    boot.add_argument("--threads", type=int, default=None)
    boot.add_argument("--out", default=None)

    orc = sub.add_parser("oracle", help="exact maximizer of the nonsmooth objective")
    _add_data_flags(orc)
    orc.add_argument("--max-n", type=int, default=500)
    orc.add_argument("--max-p", type=int, default=3)
    orc.add_argument("--out", default=None)

    sim = sub.add_parser("simulate", help="Monte Carlo study for a generative setting")
    sim.add_argument("--setting", required=True, choices=list(SETTINGS))
    sim.add_argument("--base-setting", default="s1", choices=["s1", "s2", "s3", "s4", "s5"])
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--reps", type=int, default=100)
    sim.add_argument("--B", type=int, default=None,
                     help="bootstrap replicates; enables interval coverage")
    sim.add_argument("--alpha", type=float, default=0.05)
    sim.add_argument("--weights", default="exp", choices=sorted(WEIGHT_ALIASES))
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--local-s", default="1,0,1,1")
    sim.add_argument("--eval-size", type=int, default=10000)
    sim.add_argument("--truth-draws", type=int, default=10**6)
    _add_optimizer_flags(sim)
    sim.add_argument("--threads", type=int, default=None)
    sim.add_argument("--out", default=None, help="metrics JSON path (default: stdout)")
    sim.add_argument("--csv-out", default=None, help="CSV row path (default: <out>.csv)")
    return ap


def _split(s):
    return [c.strip() for c in s.split(",") if c.strip()]


def _load(args):
    cols = args.covariates
    if cols is None:
        try:
            with open(args.csv, newline="", encoding="utf-8") as fh:
                header = next(csv.reader(fh), [])
        except OSError as exc:
            raise ValidationError(f"cannot open {args.csv}: {exc.strerror}", module="cli") from None
        cols = [h.strip() for h in header if h.strip() not in (args.outcome, args.treatment)]
    else:
        cols = _split(cols)
    return load_csv(args.csv, args.outcome, args.treatment, cols,
                    add_intercept=not args.no_intercept, anchor_col=args.anchor)


def _propensity(args, data):
    if not args.observational:
        return None, None
    if args.propensity_covariates is None:
        Z = data.covariates
        names = list(data.column_names)
    else:
        names = _split(args.propensity_covariates)
        unknown = [c for c in names if c not in data.column_names]
        if unknown:
            raise ValidationError(f"unknown propensity covariates {unknown}", module="cli")
        idx = [data.column_names.index(c) for c in names]
        Z = data.covariates[:, idx]
        if data.has_intercept and 0 not in idx:
            Z = np.column_stack([np.ones(data.n), Z])
            names = ["intercept"] + names
    model = fit_logistic(Z, data.treatment)
    return predict_propensity(model, Z), {"columns": names, "xi": model.xi,
                                         "iterations": model.iterations}


def _prox(args):
    return ProximalConfig(alpha0=args.alpha0, gamma=args.gamma, max_iterations=args.max_iter,
                          step_tolerance=args.tol, mode=args.mode)


def _config(args):
    cfg = {k: v for k, v in sorted(vars(args).items())}
    if "threads" in cfg:
        cfg["threads"] = resolve_threads(cfg["threads"])
    if "weights" in cfg:
        cfg["weights"] = WEIGHT_ALIASES[cfg["weights"]]
    return cfg


def _cmd_estimate(args):
    data = _load(args)
    pi, pmodel = _propensity(args, data)
    kernel = get_kernel(args.kernel)
    est = estimate_regime(data, kernel, _prox(args), pi)
    out = est.to_dict()
    out.update(columns=list(data.column_names), kernel=kernel.to_dict(), propensity=pmodel,
               config=_config(args))
    return out


def _cmd_bootstrap(args):
    data = _load(args)
    pi, pmodel = _propensity(args, data)
    kernel = get_kernel(args.kernel)
    bcfg = BootstrapConfig(args.B, WEIGHT_ALIASES[args.weights], args.alpha, args.seed)
    res = run_bootstrap(data, kernel, _prox(args), bcfg, pi, threads=args.threads)
    out = res.base_estimate.to_dict()
    out.update(res.to_dict())
    out.update(B=int(args.B), columns=list(data.column_names), kernel=kernel.to_dict(),
               propensity=pmodel, config=_config(args))
    return out


def _cmd_oracle(args):
    data = _load(args)
    beta, value = exact_nonsmooth_argmax(data, OracleLimits(args.max_n, args.max_p))
    return {"beta": beta, "value": value, "anchor": data.anchor_index,
            "columns": list(data.column_names), "config": _config(args)}


def _cmd_simulate(args):
    boot = None
    if args.B is not None:
        boot = BootstrapConfig(args.B, WEIGHT_ALIASES[args.weights], args.alpha, args.seed)
    try:
        local_s = tuple(float(v) for v in _split(args.local_s))
    except ValueError:
        raise ValidationError(f"--local-s must be comma-separated numbers, got {args.local_s!r}",
                              module="cli") from None
    spec = SimulationSpec(setting=args.setting, n=args.n, replicates=args.reps, bootstrap=boot,
                          kernel=get_kernel(args.kernel), seed=args.seed, local_s=local_s,
                          eval_sample_size=args.eval_size, base_setting=args.base_setting,
                          truth_draws=args.truth_draws, prox=_prox(args))
    study = run_coverage_study if boot is not None else run_estimation_study
    metrics = study(spec, threads=args.threads)
    out = metrics.to_dict()
    # thread count does not affect results, so it stays out of the byte-stable JSON
    cfg = _config(args)
    cfg.pop("threads", None)
    out["cli"] = cfg
    csv_path = args.csv_out
    if csv_path is None and args.out not in (None, "-"):
        csv_path = os.path.splitext(args.out)[0] + ".csv"
    if csv_path is not None:
        _emit(metrics.csv_row(), csv_path)
    return out


COMMANDS = {"estimate": _cmd_estimate, "bootstrap": _cmd_bootstrap, "oracle": _cmd_oracle,
            "simulate": _cmd_simulate}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        out = COMMANDS[args.command](args)
        _emit(dumps(out), args.out)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, OTRError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
