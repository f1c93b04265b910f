"""Command-line front end.

    dispersolve <subcommand> --config path [--out dir] [--seed n]

Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 configuration error,
3 solver abort.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (ExperimentError, bona_smith, dissipative_limit,
                          existence_time_probe, inequality_meter,
                          resonance_sweep, scaling_check)
from .grid import load_field
from .norms import evaluate_norm, parse_norm_spec
from .runio import (ConfigError, build_initial, build_solver_config,
                    initial_shape_fn, parse_config, write_result)
from .solver import solve
from .symbols import certify_hypothesis1, parse_symbol

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3

SUBCOMMANDS = ("solve", "norms", "diss-limit", "scaling-test", "bona-smith",
               "certify-symbol", "resonance-test", "meter", "existence-probe")


def _run_solve(rc):
    cfg = build_solver_config(rc)
    u0 = build_initial(rc.experiment.get("initial", "cos:k=1,a=1.0"),
                       cfg.grid, rc.seed)
    traj = solve(cfg, u0)
    if traj.aborted:
        return traj, EXIT_ABORT
    return traj, EXIT_PASS


def _run_norms(rc):
    from .experiments import ExperimentResult
    params = rc.experiment
    f = load_field(params["input"])
    ns = parse_norm_spec(params["norm"])
    spec = parse_symbol(rc.equation["dispersion"])
    value = evaluate_norm(ns, f, spec)
    if isinstance(value, dict):
        table = tuple({"component": k, "value": v} for k, v in value.items())
    else:
        table = ({"component": "value", "value": float(value)},)
    result = ExperimentResult(name="norms", config={"norm": params["norm"]},
                              table=table, fitted={}, verdict="pass",
                              seed=rc.seed)
    return result, EXIT_PASS


def _run_diss_limit(rc):
    cfg = build_solver_config(rc)
    u0 = build_initial(rc.experiment.get("initial", "cos:k=1,a=1.0"),
                       cfg.grid, rc.seed)
    th = {}
    if "order_min" in rc.experiment:
        th["order_min"] = float(rc.experiment["order_min"])
    result = dissipative_limit(cfg, rc.experiment["eps_list"],
                               float(rc.experiment.get("s", 0.0)), u0, th)
    return result, EXIT_PASS if result.verdict == "pass" else EXIT_FAIL


def _run_scaling(rc):
    cfg = build_solver_config(rc)
    shape = initial_shape_fn(rc.experiment.get("initial", "cos:k=1,a=1.0"),
                             cfg.grid.length, rc.seed)
    th = {}
    if "deviation_max" in rc.experiment:
        th["deviation_max"] = float(rc.experiment["deviation_max"])
    worst = None
    for lam in rc.experiment.get("lam_list", [0.5, 0.25]):
        result = scaling_check(float(lam), cfg, shape, thresholds=th)
        if worst is None or result.verdict == "fail":
            worst = result
    return worst, EXIT_PASS if worst.verdict == "pass" else EXIT_FAIL


def _run_bona_smith(rc):
    cfg = build_solver_config(rc)
    n_min = int(rc.experiment.get("n_min", 8))
    n_max = int(rc.experiment.get("n_max", 256))
    N_list = []
    N = n_min
    while N <= n_max:
        N_list.append(N)
        N *= 2
    result = bona_smith(cfg, float(rc.experiment.get("s", 0.0)), N_list,
                        float(rc.experiment.get("delta", 0.05)),
                        float(rc.experiment.get("amplitude", 0.5)))
    return result, EXIT_PASS if result.verdict.startswith("pass") else EXIT_FAIL


def _run_certify(rc):
    params = rc.experiment
    spec = parse_symbol(params.get("symbol", rc.equation["dispersion"]))
    cert = certify_hypothesis1(
        spec, float(params.get("alpha", rc.equation["alpha"])),
        xi_range=(float(params.get("xi_min", 8.0)),
                  float(params.get("xi_max", 1024.0))),
        lambda_range=(float(params.get("lambda_min", 1.0 / 64.0)),
                      float(params.get("lambda_max", 1.0))),
        samples_per_axis=int(params.get("samples", 32)),
        region=params.get("region", "xi1_large"),
        xi_floor=float(params.get("xi_floor", 8.0)))
    return cert, EXIT_PASS if cert.verdict == "certified" else EXIT_FAIL


def _run_resonance(rc):
    spec = parse_symbol(rc.experiment.get("symbol", rc.equation["dispersion"]))
    result = resonance_sweep(
        spec, float(rc.experiment.get("alpha", rc.equation["alpha"])),
        n_violating=int(rc.experiment.get("violating", 20)),
        n_compatible=int(rc.experiment.get("compatible", 5)),
        trials=int(rc.experiment.get("trials", 100)), seed=rc.seed)
    return result, EXIT_PASS if result.verdict == "pass" else EXIT_FAIL


def _run_meter(rc):
    th = {}
    if "stability_factor" in rc.experiment:
        th["stability_factor"] = float(rc.experiment["stability_factor"])
    result = inequality_meter(rc.experiment["meter"], seed=rc.seed,
                              thresholds=th)
    return result, EXIT_PASS if result.verdict == "pass" else EXIT_FAIL


def _run_probe(rc):
    cfg = build_solver_config(rc)
    shape = build_initial(rc.experiment.get("initial", "bump:a=1,w=8"),
                          cfg.grid, rc.seed)
    result = existence_time_probe(
        rc.experiment.get("amplitudes", [1.0, 2.0, 4.0, 8.0, 16.0]),
        cfg, shape.values,
        float(rc.experiment.get("s", 1.0 - cfg.alpha / 2.0)))
    return result, EXIT_PASS if result.verdict == "pass" else EXIT_FAIL


_RUNNERS = {
    "solve": _run_solve,
    "norms": _run_norms,
    "diss-limit": _run_diss_limit,
    "scaling-test": _run_scaling,
    "bona-smith": _run_bona_smith,
    "certify-symbol": _run_certify,
    "resonance-test": _run_resonance,
    "meter": _run_meter,
    "existence-probe": _run_probe,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dispersolve",
        description="pseudo-spectral solver and verification experiments for "
                    "fractional dispersive equations")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML run config")
        p.add_argument("--out", default=None, help="run-directory root")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rc = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        rc = type(rc)(equation=rc.equation, grid=rc.grid, time=rc.time,
                      experiment=rc.experiment, output=rc.output,
                      seed=args.seed)
    expected = rc.experiment.get("name")
    if expected != args.command and not (
            args.command == "solve" and expected == "solve"):
        print(f"config error: experiment.name={expected!r} does not match "
              f"subcommand {args.command!r}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        result, code = _RUNNERS[args.command](rc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExperimentError as exc:
        if "abort" in str(exc):
            print(f"solver abort: {exc}", file=sys.stderr)
            return EXIT_ABORT
        print(f"experiment failed: {exc}", file=sys.stderr)
        return EXIT_FAIL

    out_root = args.out or rc.output.get("directory", "runs")
    manifest = write_result(out_root, rc, result)
    where = Path(out_root) / manifest["run_id"]
    if manifest.get("existing"):
        print(f"identical config already run: {where}")
    else:
        print(f"run written: {where}")
    print(f"verdict: {manifest['verdict']}")
    return code


if __name__ == "__main__":
    sys.exit(main())
