"""Command-line front end: simulate, stability, fit, sensitivity.

All outputs are plot-ready CSV/JSON at full double precision; every
command is deterministic given its config and seed. Exit codes: 0 ok,
2 config error, 3 simulation error, 4 data error, 5 inference error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import tempfile

import numpy as np

from . import data as data_mod
from . import inference, sensitivity
from .errors import ConfigError, ScamdynError
from .integrators import Scheme, StepConfig, simulate, total_population_bound_check
from .model import (NOMINAL_PARAMS, PARAM_NAMES, Parameters, State,
                    classify_sfe_stability)
from .observe import month_times

EXIT_CONFIG = 2
EXIT_SIMULATION = 3
EXIT_DATA = 4
EXIT_INFERENCE = 5

_SECTION_KEYS = {
    "params": set(PARAM_NAMES),
    "init": {"s", "v", "r", "as", "rs"},
    "sim": {"h", "t_end", "scheme"},
    "fit": {"iterations", "adapt_interval", "dr_stages", "seed", "observable",
            "burn_in", "error_model", "sigma2", "n0", "s20", "n_draws",
            "scale"},
    "sensitivity": {"n", "seed", "horizon", "h"} |
                   {f"range_{p}" for p in PARAM_NAMES},
}

_DEFAULT_INIT = State(s=1000.0, v=100.0, r=0.0, a_s=200.0, r_s=0.0)


class RunConfig:
    """Validated key-value configuration; unknown keys are a hard error."""

    def __init__(self, values: dict[str, dict[str, str]] | None = None):
        self.values = values or {}

    @classmethod
    def load(cls, path) -> "RunConfig":
        parser = configparser.ConfigParser()
        try:
            read = parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        if not read:
            raise ConfigError(f"cannot read config {path}")
        values: dict[str, dict[str, str]] = {}
        for section in parser.sections():
            if section not in _SECTION_KEYS:
                raise ConfigError(f"unknown section [{section}]")
            allowed = _SECTION_KEYS[section]
            for key, val in parser.items(section):
                if key not in allowed:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                values.setdefault(section, {})[key] = val
        return cls(values)

    def get(self, section: str, key: str, default=None) -> str | None:
        return self.values.get(section, {}).get(key, default)

    def getfloat(self, section: str, key: str, default: float) -> float:
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from exc

    def getint(self, section: str, key: str, default: int) -> int:
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: not an integer: {raw!r}") from exc

    def params(self) -> Parameters:
        base = {name: NOMINAL_PARAMS._field(name) for name in PARAM_NAMES}
        for name in PARAM_NAMES:
            base[name] = self.getfloat("params", name, base[name])
        return Parameters(beta=base["beta"], sigma=base["sigma"],
                          gamma=base["gamma"], psi=base["psi"],
                          delta=base["delta"], mu=base["mu"],
                          lam=base["lambda"])

    def init_state(self) -> State:
        try:
            return State(
                s=self.getfloat("init", "s", _DEFAULT_INIT.s),
                v=self.getfloat("init", "v", _DEFAULT_INIT.v),
                r=self.getfloat("init", "r", _DEFAULT_INIT.r),
                a_s=self.getfloat("init", "as", _DEFAULT_INIT.a_s),
                r_s=self.getfloat("init", "rs", _DEFAULT_INIT.r_s),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def ranges(self) -> np.ndarray:
        ranges = sensitivity.DEFAULT_RANGES.copy()
        for j, name in enumerate(PARAM_NAMES):
            raw = self.get("sensitivity", f"range_{name}")
            if raw is not None:
                try:
                    lo, hi = (float(tok) for tok in raw.split(","))
                except ValueError as exc:
                    raise ConfigError(
                        f"range_{name}: expected 'low,high', got {raw!r}") from exc
                ranges[j] = (lo, hi)
        return ranges


def _atomic_write(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_move(writer, path) -> None:
    """Run writer(tmp_path) then atomically rename onto path."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _summary_dict(params: Parameters, traj, n0: float) -> dict:
    report = classify_sfe_stability(params, n0)
    return {
        "r0": report.r0,
        "classification": report.classification.value,
        "n0": float(traj.totals[0]),
        "n_end": float(traj.totals[-1]),
        "bound_check": total_population_bound_check(traj),
    }


def cmd_simulate(args) -> int:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    params = cfg.params()
    init = cfg.init_state()
    h = args.h if args.h is not None else cfg.getfloat("sim", "h", 1.0)
    t_end = args.t_end if args.t_end is not None else cfg.getfloat(
        "sim", "t_end", sensitivity.DEFAULT_HORIZON)
    scheme_name = args.scheme or cfg.get("sim", "scheme", "nsfd")
    try:
        scheme = Scheme(scheme_name)
    except ValueError:
        raise ConfigError(f"unknown scheme {scheme_name!r}")

    sweeps: list[tuple[str, str, Parameters]] = []
    if args.sweep:
        name, _, tokens = args.sweep.partition("=")
        if name not in PARAM_NAMES or not tokens:
            raise ConfigError(f"bad sweep spec {args.sweep!r}")
        idx = PARAM_NAMES.index(name)
        for tok in tokens.split(","):
            try:
                value = float(tok)
            except ValueError:
                raise ConfigError(f"bad sweep value {tok!r}")
            arr = params.as_array()
            arr[idx] = value
            sweeps.append((name, tok, Parameters.from_array(arr)))
    else:
        sweeps.append(("", "", params))

    os.makedirs(args.out, exist_ok=True)
    step_cfg = StepConfig(h=h, t_end=t_end, scheme=scheme)
    for name, tok, p in sweeps:
        suffix = f"_{name}_{tok}" if name else ""
        traj = simulate(init, p, step_cfg)
        _atomic_move(traj.to_csv, os.path.join(args.out, f"trajectory{suffix}.csv"))
        n_for_r0 = args.n if args.n is not None else init.total
        _atomic_write(os.path.join(args.out, f"summary{suffix}.json"),
                      _json_text(_summary_dict(p, traj, n_for_r0)))
    return 0


def cmd_stability(args) -> int:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    params = cfg.params()
    n = args.n if args.n is not None else cfg.init_state().total
    report = classify_sfe_stability(params, n, tol=args.tol)
    out = {
        "r0": report.r0,
        "p1": report.p1,
        "p2": report.p2,
        "discriminant": report.discriminant,
        "eigenvalue_1": report.eigenvalue_pair[0],
        "eigenvalue_2": report.eigenvalue_pair[1],
        "classification": report.classification.value,
        "see_condition": report.r0 - 1.0,
    }
    sys.stdout.write(_json_text(out))
    return 0


def cmd_fit(args) -> int:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    params = cfg.params()
    init = cfg.init_state()
    scale = cfg.getfloat("fit", "scale", 1.0)
    try:
        series_list = data_mod.load_reports(args.data, scale=scale)
        series = data_mod.pool(series_list)
    except (ScamdynError, OSError) as exc:
        raise _DataError(str(exc))

    iterations = args.iterations if args.iterations is not None else cfg.getint(
        "fit", "iterations", 10000)
    seed = args.seed if args.seed is not None else cfg.getint("fit", "seed", 0)
    observable = args.observable or cfg.get("fit", "observable", "prevalence")
    burn_in = cfg.getfloat("fit", "burn_in", 0.2)
    n_draws = cfg.getint("fit", "n_draws", 200)
    model_name = cfg.get("fit", "error_model", "sampled")
    if model_name == "fixed":
        error_model = inference.FixedSigma(cfg.getfloat("fit", "sigma2", 1.0))
    elif model_name == "sampled":
        error_model = inference.SampledSigma(n0=cfg.getfloat("fit", "n0", 1.0),
                                             s20=cfg.getfloat("fit", "s20", 1.0))
    else:
        raise ConfigError(f"unknown error_model {model_name!r}")

    fit_cfg = inference.FitConfig(
        init_params=params, init_state=init, obs_times=series.times(),
        iterations=iterations,
        adapt_interval=cfg.getint("fit", "adapt_interval", 100),
        dr_stages=cfg.getint("fit", "dr_stages", 2),
        seed=seed, error_model=error_model, observable=observable)
    try:
        chain = inference.run_dram(fit_cfg, series.counts,
                                   inference.PriorBounds.default())
        summary = inference.summarize(chain, burn_in)
        kept = len(chain) - int(burn_in * len(chain))
        band = inference.posterior_predictive(
            chain, min(n_draws, kept), init,
            horizon=float(series.times()[-1]) + 1.0, seed=seed,
            burn_in_fraction=burn_in)
    except ScamdynError as exc:
        raise _InferenceError(str(exc))

    os.makedirs(args.out, exist_ok=True)
    _atomic_move(lambda p: inference.chain_to_csv(chain, p),
                 os.path.join(args.out, "chain.csv"))
    _atomic_move(lambda p: inference.summary_to_csv(summary, p),
                 os.path.join(args.out, "summary.csv"))
    _atomic_move(lambda p: inference.band_to_csv(band, p),
                 os.path.join(args.out, "predictive.csv"))
    sys.stdout.write(f"acceptance_rate {chain.acceptance_rate:.6f}\n")
    return 0


def cmd_sensitivity(args) -> int:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    params = cfg.params()
    os.makedirs(args.out, exist_ok=True)
    if not args.local and not args.global_:
        raise ConfigError("choose --local and/or --global")
    if args.local:
        indices = sensitivity.local_indices(params)
        _atomic_move(lambda p: sensitivity.local_indices_to_csv(indices, p),
                     os.path.join(args.out, "local_indices.csv"))
    if args.global_:
        n = args.n if args.n is not None else cfg.getint("sensitivity", "n", 2500)
        seed = args.seed if args.seed is not None else cfg.getint(
            "sensitivity", "seed", 0)
        horizon = args.horizon if args.horizon is not None else cfg.getfloat(
            "sensitivity", "horizon", sensitivity.DEFAULT_HORIZON)
        h = cfg.getfloat("sensitivity", "h", 1.0)
        df = n - 8
        if df < 30:
            sys.stderr.write(f"warning: low degrees of freedom (df={df})\n")
        sys.stderr.write(f"running {n} samples over {horizon} days...\n")
        report = sensitivity.global_analysis(n, cfg.ranges(),
                                             init=cfg.init_state(),
                                             horizon=horizon, seed=seed, h=h)
        if report.dropped_rows:
            sys.stderr.write(f"dropped {report.dropped_rows} failed rows\n")
        _atomic_move(lambda p: sensitivity.global_report_to_csv(report, p),
                     os.path.join(args.out, "prcc.csv"))
    return 0


class _DataError(ScamdynError):
    pass


class _InferenceError(ScamdynError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scamdyn",
        description="Scam-propagation model: simulation, calibration, "
                    "sensitivity analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI configuration file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None)

    p_sim = sub.add_parser("simulate", help="integrate the model")
    common(p_sim)
    p_sim.add_argument("--sweep", help="param=v1,v2,... one run per value")
    p_sim.add_argument("--scheme", choices=[s.value for s in Scheme])
    p_sim.add_argument("--h", type=float)
    p_sim.add_argument("--t-end", dest="t_end", type=float)
    p_sim.add_argument("--n", type=float, help="N used for R0 in the summary")
    p_sim.set_defaults(func=cmd_simulate)

    p_st = sub.add_parser("stability", help="SFE stability report as JSON")
    common(p_st)
    p_st.add_argument("--n", type=float)
    p_st.add_argument("--tol", type=float, default=1e-9)
    p_st.set_defaults(func=cmd_stability)

    p_fit = sub.add_parser("fit", help="calibrate against a report CSV")
    common(p_fit)
    p_fit.add_argument("data", help="monthly report CSV")
    p_fit.add_argument("--iterations", type=int)
    p_fit.add_argument("--observable", choices=["prevalence", "incidence"])
    p_fit.set_defaults(func=cmd_fit)

    p_sens = sub.add_parser("sensitivity", help="local and/or global analysis")
    common(p_sens)
    p_sens.add_argument("--local", action="store_true")
    p_sens.add_argument("--global", dest="global_", action="store_true")
    p_sens.add_argument("--n", type=int)
    p_sens.add_argument("--horizon", type=float)
    p_sens.set_defaults(func=cmd_sensitivity)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except _DataError as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EXIT_DATA
    except _InferenceError as exc:
        sys.stderr.write(f"inference error: {exc}\n")
        return EXIT_INFERENCE
    except ScamdynError as exc:
        sys.stderr.write(f"simulation error: {exc}\n")
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
