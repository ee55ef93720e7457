"""Command-line entry points.

Subcommands:

    solve    --config FILE [--output FILE]   run one problem, report metrics
    converge --preset NAME --knots LIST [--output FILE]   knot sweep, CSV
    presets                                  list the built-in problems
    validate                                 preset + kernel sanity checks

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
failure (resonant embedding box, singular collocation matrix).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from .errors import ConfigurationError, NumericalError
from .geometry import Circle, Ellipse, Star, StarDomain
from .operators import (ConvectionDiffusion, Helmholtz, ModifiedHelmholtz,
                        OperatorSpec, Poisson, apply_operator_fd, kernel_value)
from .pipeline import (InlineProblem, RunConfig, boundary_residual,
                       convergence_study, error_metrics, evaluation_points,
                       residual_check, rows_to_csv, run_pipeline)
from .presets import all_presets, check_self_consistency, get_preset

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_CONFIG_KEYS = {"preset", "problem", "knots", "grid", "box_margin", "taper",
                "trefftz_order", "svd_cutoff", "strategy", "rings", "per_ring"}
_PROBLEM_KEYS = {"operator", "domain", "bc_kind"}


def _reject_unknown(obj: dict, allowed: set, what: str):
    for key in obj:
        if key not in allowed:
            raise ConfigurationError(f"unknown {what} key {key!r}")


def _parse_operator(obj: dict) -> OperatorSpec:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ConfigurationError("operator must be an object with a 'type' key")
    kind = obj["type"]
    if kind == "poisson":
        _reject_unknown(obj, {"type"}, "operator")
        return Poisson()
    if kind == "helmholtz":
        _reject_unknown(obj, {"type", "k"}, "operator")
        return Helmholtz(float(obj["k"]))
    if kind == "modified_helmholtz":
        _reject_unknown(obj, {"type", "k"}, "operator")
        return ModifiedHelmholtz(float(obj["k"]))
    if kind == "convection_diffusion":
        _reject_unknown(obj, {"type", "diffusivity", "velocity", "reaction"}, "operator")
        return ConvectionDiffusion(
            diffusivity=float(obj["diffusivity"]),
            velocity=[float(c) for c in obj["velocity"]],
            reaction=float(obj.get("reaction", 0.0)))
    raise ConfigurationError(f"unknown operator type {kind!r}")


def _parse_domain(obj: dict) -> StarDomain:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ConfigurationError("domain must be an object with a 'type' key")
    kind = obj["type"]
    center = obj.get("center", (0.0, 0.0))
    if kind == "circle":
        _reject_unknown(obj, {"type", "radius", "center"}, "domain")
        return StarDomain(Circle(float(obj["radius"])), center=center)
    if kind == "ellipse":
        _reject_unknown(obj, {"type", "a", "b", "center"}, "domain")
        return StarDomain(Ellipse(float(obj["a"]), float(obj["b"])), center=center)
    if kind == "star":
        _reject_unknown(obj, {"type", "base", "amplitude", "lobes", "center"}, "domain")
        return StarDomain(Star(base=float(obj["base"]),
                               amplitude=float(obj["amplitude"]),
                               lobes=int(obj["lobes"])), center=center)
    raise ConfigurationError(f"unknown domain type {kind!r}")


def parse_config(obj: dict) -> RunConfig:
    if not isinstance(obj, dict):
        raise ConfigurationError("config root must be a JSON object")
    _reject_unknown(obj, _CONFIG_KEYS, "config")
    kwargs = {}
    if "preset" in obj:
        kwargs["preset"] = str(obj["preset"])
    if "problem" in obj:
        prob = obj["problem"]
        if not isinstance(prob, dict):
            raise ConfigurationError("'problem' must be a JSON object")
        _reject_unknown(prob, _PROBLEM_KEYS, "problem")
        bc_kind = prob.get("bc_kind", "dirichlet")
        if bc_kind not in ("dirichlet", "neumann"):
            raise ConfigurationError(f"bc_kind must be 'dirichlet' or 'neumann', got {bc_kind!r}")
        kwargs["problem"] = InlineProblem(
            operator=_parse_operator(prob.get("operator", {})),
            domain=_parse_domain(prob.get("domain", {})),
            bc_kind=bc_kind)
    for key, conv in [("knots", int), ("grid", int), ("box_margin", float),
                      ("taper", float), ("trefftz_order", int),
                      ("svd_cutoff", float), ("strategy", str),
                      ("rings", int), ("per_ring", int)]:
        if key in obj:
            kwargs[key] = conv(obj[key])
    return RunConfig(**kwargs)


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path!r} is not valid JSON: {exc}") from exc
    return parse_config(obj)


def _cmd_solve(args) -> int:
    config = load_config(args.config)
    result = run_pipeline(config)
    points = evaluation_points(config)
    report = {
        "preset": config.preset,
        "knots": config.knots,
        "strategy": result.diagnostics.strategy_used,
        "condition_estimate": result.diagnostics.condition_estimate,
        "effective_rank": result.diagnostics.effective_rank,
        "solver_residual_norm": result.diagnostics.residual_norm,
        "boundary_residual": boundary_residual(result),
    }
    problem = result.problem
    if problem.exact is not None:
        max_err, rms_err = error_metrics(result.field.evaluate, problem.exact, points)
        report["max_err"] = max_err
        report["rms_err"] = rms_err
    report["interior_residual"] = residual_check(
        result.field, problem.operator, problem.source, points[:50], h=1e-3)
    text = json.dumps(report, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_converge(args) -> int:
    try:
        knot_counts = [int(part) for part in args.knots.split(",") if part]
    except ValueError as exc:
        raise ConfigurationError(f"bad --knots list {args.knots!r}") from exc
    config = RunConfig(preset=args.preset)
    rows = convergence_study(config, knot_counts)
    csv = rows_to_csv(rows)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    if any(row.error for row in rows):
        for row in rows:
            if row.error:
                print(f"N={row.knots}: {row.error}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_presets(_args) -> int:
    for preset in all_presets():
        print(f"{preset.name:24s} {preset.description}")
    return EXIT_OK


def _cmd_validate(_args) -> int:
    failures = 0
    for preset in all_presets():
        mismatch = check_self_consistency(preset)
        ok = math.isnan(mismatch) or mismatch <= 1e-4
        status = "PASS" if ok else "FAIL"
        failures += not ok
        print(f"{status} preset {preset.name}: |L u* - f| = {mismatch:.3g}")
    rng = np.random.default_rng(20240817)
    kernels = [Helmholtz(2.0), ModifiedHelmholtz(1.0),
               ConvectionDiffusion(1.0, (2.0, 0.0), 1.0)]
    for op in kernels:
        worst = 0.0
        for _ in range(20):
            angle = rng.uniform(0, 2 * np.pi)
            radius = rng.uniform(0.05, 1.0)
            d = radius * np.array([np.cos(angle), np.sin(angle)])
            shift = rng.uniform(-1, 1, size=2)
            u = lambda x, y: kernel_value(op, np.array([x, y]) - shift)
            worst = max(worst, abs(apply_operator_fd(op, u, shift + d, 1e-3)))
        ok = worst <= 1e-4
        status = "PASS" if ok else "FAIL"
        failures += not ok
        print(f"{status} kernel annihilation {type(op).__name__}: "
              f"max |L phi| = {worst:.3g}")
    return EXIT_OK if failures == 0 else EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasirbf",
        description="Meshfree elliptic solver: FFT particular solution on an "
                    "embedding box plus boundary-knot collocation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one configured problem")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--output")
    p_solve.set_defaults(func=_cmd_solve)

    p_conv = sub.add_parser("converge", help="knot-count convergence study")
    p_conv.add_argument("--preset", required=True)
    p_conv.add_argument("--knots", required=True,
                        help="comma-separated increasing knot counts")
    p_conv.add_argument("--output")
    p_conv.set_defaults(func=_cmd_converge)

    p_presets = sub.add_parser("presets", help="list built-in problems")
    p_presets.set_defaults(func=_cmd_presets)

    p_val = sub.add_parser("validate", help="run self-consistency checks")
    p_val.set_defaults(func=_cmd_validate)
    return parser


def run_cli(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
