"""Command line front end.

Subcommands:
    sweep    closed-form metric grid -> CSV, plot data, figures, summary
    solve    split-step solver validation battery -> report + snapshot
    audit    no-signaling audit of a single parameter point
    schwarz  randomized overlap-inequality trials

Option precedence is flag > environment > config file > built-in default;
the environment variables are SGLAB_OUT, SGLAB_SEED, SGLAB_THREADS and
SGLAB_EPSILON.  Exit codes: 0 success, 1 configuration error, 2 numerical
failure (non-convergence or a failed check), 3 overlap-bound violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .config import SweepConfig, load_config
from .errors import (ConfigError, ConvergenceError, ForbiddenRegimeError,
                     SGLabError)
from .params import from_groups
from .signaling import signaling_audit
from .solver import save_snapshot
from .sweep import run_schwarz_trials, run_sweep
from .validation import ValidationConfig, run_solver_validation

DEFAULT_OUT = "sglab_out"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 is reserved here, so remap to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _env(name: str, cast, label: str):
    raw = os.environ.get(name)
    if raw is None:
        return None
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}: expected {label}, got {raw!r}") from exc


def _resolve(flag_value, env_name, cast, label, config_value, default):
    if flag_value is not None:
        return flag_value
    env_value = _env(env_name, cast, label)
    if env_value is not None:
        return env_value
    if config_value is not None:
        return config_value
    return default


def _resolve_out(args) -> str:
    return _resolve(args.out, "SGLAB_OUT", str, "path", None, DEFAULT_OUT)


def _resolve_epsilon(args, config_value=None) -> float:
    epsilon = _resolve(args.epsilon, "SGLAB_EPSILON", float, "a number",
                       config_value, 1e-3)
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    return epsilon


def _resolve_seed(args, config_value=None) -> int:
    return _resolve(args.seed, "SGLAB_SEED", int, "an integer",
                    config_value, 0)


def _resolve_threads(args, config_value=None) -> int:
    threads = _resolve(args.threads, "SGLAB_THREADS", int, "an integer",
                       config_value, 1)
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    return threads


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sglab",
                     description="nonideal two-branch beam laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=False):
        p.add_argument("--config", required=config_required,
                       help="configuration file path")
        p.add_argument("--out", help=f"output directory "
                                     f"(default {DEFAULT_OUT})")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--threads", type=int, help="worker threads")
        p.add_argument("--epsilon", type=float,
                       help="ideal-regime classification threshold")
        p.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering")

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    common(p_sweep, config_required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_solve = sub.add_parser("solve", help="run the solver validation battery")
    common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_audit = sub.add_parser("audit", help="audit one point for signaling")
    common(p_audit)
    p_audit.add_argument("--t1", type=float, default=0.0,
                         help="evaluation time after exit")
    p_audit.add_argument("--directions", type=int, default=1000,
                         help="random directions for the brute-force search")
    p_audit.add_argument("--json", action="store_true",
                         help="print the report as JSON")
    p_audit.set_defaults(func=cmd_audit)

    p_schwarz = sub.add_parser(
        "schwarz", help="randomized overlap-inequality trials")
    common(p_schwarz)
    p_schwarz.add_argument("--trials", type=int, default=1000,
                           help="number of random pairs")
    p_schwarz.set_defaults(func=cmd_schwarz)

    return parser


def _load_optional_config(args) -> SweepConfig | None:
    if args.config is None:
        return None
    return load_config(args.config)


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    config = dataclasses.replace(
        config,
        epsilon=_resolve_epsilon(args, config.epsilon),
        seed=_resolve_seed(args, config.seed),
        threads=_resolve_threads(args, config.threads),
    )
    out_dir = _resolve_out(args)
    figures = config.figures and not args.no_figures
    summary = run_sweep(config, out_dir, figures=figures)
    print(f"rows: {summary.rows} (ideal {summary.ideal}, "
          f"general_nonideal {summary.general_nonideal})")
    print(f"min margin M_s - I: {summary.min_margin:.6e}")
    print(f"max delta_max: {summary.max_delta_max:.6e}")
    for path in summary.files:
        print(f"wrote {path}")
    return 0


def cmd_solve(args) -> int:
    config = _load_optional_config(args)
    kwargs = {}
    if config is not None:
        solver_cfg = config.solver
        if "nx" in solver_cfg:
            kwargs["nx"] = solver_cfg["nx"]
        if "nz" in solver_cfg:
            kwargs["nz"] = solver_cfg["nz"]
        if "dt" in solver_cfg:
            kwargs["dt"] = solver_cfg["dt"]
    report = run_solver_validation(ValidationConfig(**kwargs))

    out_dir = _resolve_out(args)
    os.makedirs(out_dir, exist_ok=True)
    for check in report.checks:
        word = "PASS" if check.passed else "FAIL"
        note = f"  ({check.note})" if check.note else ""
        print(f"{word} {check.name}: measured {check.measured:.6e} "
              f"vs threshold {check.threshold:.6e}{note}")
    print(f"battery runtime: {report.runtime_s:.1f} s")

    report_path = os.path.join(out_dir, "validation.json")
    with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {report_path}")

    snap_path = os.path.join(out_dir, "exit_state.snap")
    save_snapshot(report.exit_solver, report.exit_state, snap_path)
    print(f"wrote {snap_path}")

    if not args.no_figures:
        from .figures import render_validation_figures
        for path in render_validation_figures(report, out_dir):
            print(f"wrote {path}")

    if not report.all_passed:
        failed = [c.name for c in report.checks if not c.passed]
        raise ConvergenceError("validation checks failed: "
                               + ", ".join(failed))
    return 0


def cmd_audit(args) -> int:
    config = _load_optional_config(args)
    if config is not None:
        params = config.base
        epsilon = _resolve_epsilon(args, config.epsilon)
    else:
        params = from_groups(2.0, 1.0)
        epsilon = _resolve_epsilon(args)
    report = signaling_audit(params, t1=args.t1, epsilon=epsilon)
    payload = {
        "I": report.i_value,
        "M_t": report.m_t,
        "M_s": report.m_sat,
        "delta_max": report.delta_max,
        "bound_ok": report.bound_ok,
        "regime": report.regime,
        "equatorial_delta_abs": report.equatorial.delta_abs,
        "equatorial_bound": report.equatorial.bound,
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"I   = {report.i_value:.16e}")
        print(f"M_t = {report.m_t:.16e}  (t1 = {args.t1:g})")
        print(f"M_s = {report.m_sat:.16e}")
        print(f"delta_max = {report.delta_max:.16e}")
        print(f"regime = {report.regime}")
        print("bound delta_max <= M_s: "
              + ("holds" if report.bound_ok else "VIOLATED"))
    if args.out is not None or os.environ.get("SGLAB_OUT"):
        out_dir = _resolve_out(args)
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "audit.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {path}")
    if not report.bound_ok:
        raise ForbiddenRegimeError("delta_max exceeds the saturated overlap")
    return 0


def cmd_schwarz(args) -> int:
    config = _load_optional_config(args)
    seed = _resolve_seed(args, config.seed if config else None)
    if args.trials < 1:
        raise ConfigError(f"trials must be >= 1, got {args.trials}")
    result = run_schwarz_trials(n_trials=args.trials, seed=seed)
    print(f"trials: {result.trials}")
    print(f"min margin: {result.min_margin:.6e}")
    print(f"equality worst gap: {result.equality_worst:.6e}")
    print(f"violations: {result.violations}")
    if not result.all_ok:
        raise ConvergenceError(
            f"{result.violations} trials violated the overlap inequality")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ForbiddenRegimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SGLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
