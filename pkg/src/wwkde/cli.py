"""Command-line interface: config-driven, reproducible, machine-readable.

Exit codes: 0 on success, 1 on contract or configuration errors, 2 when a
run completes but a falsification flag or acceptance window is hit (so CI
pipelines can tell "broken invocation" from "theory check failed").  Every
experiment run writes a manifest alongside its outputs.

CSV outputs are comma-separated with '.' decimals, LF line endings, and a
mandatory header row; JSON outputs use stable key order.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bandwidth import BandwidthSchedule, normalizer
from .estimator import EvaluationGrid, pr_batch, ww_batch
from .kernels import QuadratureSettings, make_kernel, validate_kernel
from .runmeta import RunManifest, config_hash
from .simulate import (ExperimentConfig, calibrate_constant, default_workers,
                       read_curve_csv, run_rate_experiment, run_tail_experiment,
                       write_rate_csv, write_tail_csv)
from .svgplot import line_svg, loglog_svg
from .tailbounds import TailModel, confidence_radius
from .validation import ContractViolation

__all__ = ["main", "dispatch"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FALSIFIED = 2


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    print(text)


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_validate_kernel(args) -> int:
    kernel = make_kernel(args.family, args.dim, args.order)
    settings = QuadratureSettings(nodes_per_axis=args.nodes,
                                  truncation_radius=args.truncation_radius,
                                  tol=args.tol)
    report = validate_kernel(kernel, settings, max_moment_order=args.max_moment_order)
    _emit_json(report.to_jsonable(), args.out)
    return EXIT_OK if report.passed else EXIT_FALSIFIED


def _read_samples_csv(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    skip = 0
    try:
        [float(tok) for tok in first.strip().split(",") if tok]
    except ValueError:
        skip = 1
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    return data


def _parse_axis_list(raw: str, dim: int, name: str) -> list:
    parts = [float(tok) for tok in raw.split(",")]
    if len(parts) == 1:
        parts = parts * dim
    if len(parts) != dim:
        raise ContractViolation(f"{name} needs 1 or {dim} comma-separated values")
    return parts


def _cmd_estimate(args) -> int:
    samples = _read_samples_csv(args.samples)
    dim = samples.shape[1]
    kernel = make_kernel(args.kernel, dim, args.order)
    schedule = BandwidthSchedule(c2=args.c2, beta=args.beta, dim=dim,
                                 log_gamma=args.gamma)
    lower = _parse_axis_list(args.grid_min, dim, "--grid-min")
    upper = _parse_axis_list(args.grid_max, dim, "--grid-max")
    num = [int(v) for v in _parse_axis_list(args.grid_points, dim, "--grid-points")]
    grid = EvaluationGrid.regular(lower, upper, num)

    manifest = RunManifest(config_hash=config_hash({
        "command": "estimate", "kernel": args.kernel, "order": args.order,
        "beta": args.beta, "c2": args.c2, "gamma": args.gamma,
        "grid": [lower, upper, num], "pr_bandwidth": args.pr_bandwidth,
    }), tool_version=__version__)

    values = ww_batch(samples, grid, kernel, schedule)
    columns = [f"x_{i + 1}" for i in range(dim)] + ["f_ww"]
    table = [grid.points[:, i] for i in range(dim)] + [values]
    if args.pr_bandwidth is not None:
        if args.pr_bandwidth == "auto":
            h_n = args.c2 * len(samples) ** (-1.0 / (2.0 * args.beta + dim))
        else:
            h_n = float(args.pr_bandwidth)
        table.append(pr_batch(samples, grid, kernel, h_n))
        columns.append("f_pr")

    out = Path(args.out)
    lines = [",".join(columns)]
    for row in zip(*table):
        lines.append(",".join(_fmt(v) for v in row))
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    manifest.add_output(out)
    manifest.write(out.with_suffix(out.suffix + ".manifest.json"))
    return EXIT_OK


def _cmd_ci(args) -> int:
    tm = TailModel(beta=args.beta, dim=args.d, c_upper=args.c4)
    radius = confidence_radius(tm, args.n, args.alpha)
    b_n = normalizer(args.n, args.beta, args.d)
    u_star = radius * b_n
    payload = {
        "n": args.n, "beta": args.beta, "d": args.d, "alpha": args.alpha,
        "c4": args.c4, "c3": args.c3,
        "u_star": u_star,
        "radius": radius,
        "half_width": radius + args.c3 / b_n,
    }
    _emit_json(payload, args.out)
    return EXIT_OK


def _load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return ExperimentConfig.from_dict(raw)


def _experiment_manifest(cfg: ExperimentConfig) -> RunManifest:
    return RunManifest(config_hash=config_hash(cfg.to_dict()),
                       tool_version=__version__, base_seed=cfg.base_seed)


def _cmd_rate_experiment(args) -> int:
    cfg = _load_config(args.config)
    manifest = _experiment_manifest(cfg)
    report = run_rate_experiment(cfg, workers=args.workers)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "rate.csv"
    write_rate_csv(report, csv_path)
    manifest.add_output(csv_path)
    json_path = out_dir / "report.json"
    json_path.write_text(json.dumps(report.to_jsonable(), sort_keys=True, indent=2) + "\n",
                         encoding="utf-8")
    manifest.add_output(json_path)
    if args.plot:
        svg_path = out_dir / "rate.svg"
        anchor = math.log10(report.mean_errors[0]) - report.theory_slope * math.log10(cfg.n_values[0])
        loglog_svg(svg_path,
                   [{"x": list(cfg.n_values), "y": report.mean_errors.tolist(),
                     "label": f"measured slope {report.slope:.3f}"}],
                   [{"slope": report.theory_slope, "intercept": anchor,
                     "label": f"theory slope {report.theory_slope:.3f}"}],
                   title="convergence rate", xlabel="n", ylabel="RMS error")
        manifest.add_output(svg_path)
    manifest.write(out_dir / "manifest.json")
    print(json.dumps(report.to_jsonable(), sort_keys=True, indent=2))
    if cfg.acceptance:
        expected = float(cfg.acceptance["expected_slope"])
        tol = float(cfg.acceptance["tolerance"])
        if abs(report.slope - expected) > tol:
            print(f"acceptance miss: slope {report.slope} not within {tol} of {expected}",
                  file=sys.stderr)
            return EXIT_FALSIFIED
    return EXIT_OK


def _cmd_tail_experiment(args) -> int:
    cfg = _load_config(args.config)
    manifest = _experiment_manifest(cfg)
    curve = run_tail_experiment(cfg, workers=args.workers)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "tail.csv"
    write_tail_csv(curve, csv_path)
    manifest.add_output(csv_path)
    json_path = out_dir / "report.json"
    json_path.write_text(json.dumps(curve.to_jsonable(), sort_keys=True, indent=2) + "\n",
                         encoding="utf-8")
    manifest.add_output(json_path)
    if args.plot:
        svg_path = out_dir / "tail.svg"
        loglog_svg(svg_path,
                   [{"x": curve.u.tolist(), "y": np.maximum(curve.p_hat, 1e-300).tolist(),
                     "label": f"exceedance, fitted exponent {curve.fitted_exponent:.3f}"}],
                   title="tail exceedance", xlabel="u", ylabel="P(deviation > u)")
        manifest.add_output(svg_path)
    manifest.write(out_dir / "manifest.json")
    print(json.dumps(curve.to_jsonable(), sort_keys=True, indent=2))
    if cfg.acceptance:
        expected = float(cfg.acceptance["expected_exponent"])
        tol = float(cfg.acceptance["tolerance"])
        if not curve.reliable or abs(curve.fitted_exponent - expected) > tol:
            print(f"acceptance miss: exponent {curve.fitted_exponent} not within "
                  f"{tol} of {expected}", file=sys.stderr)
            return EXIT_FALSIFIED
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    curve = read_curve_csv(args.curve)
    tm = TailModel(beta=args.beta, dim=args.d)
    result = calibrate_constant(curve, tm, c_max=args.c_max)
    _emit_json(result.to_jsonable(), args.out)
    return EXIT_FALSIFIED if result.falsified else EXIT_OK


def _cmd_plot(args) -> int:
    if args.kind == "rate":
        data = np.genfromtxt(args.input, delimiter=",", names=True)
        x = np.atleast_1d(data["n"])
        y = np.atleast_1d(data["mean_error"])
        lines = []
        if args.theory_slope is not None:
            anchor = math.log10(y[0]) - args.theory_slope * math.log10(x[0])
            lines = [{"slope": args.theory_slope, "intercept": anchor, "label": "theory"}]
        loglog_svg(args.out, [{"x": x.tolist(), "y": y.tolist(), "label": "RMS error"}],
                   lines, title="convergence rate", xlabel="n", ylabel="RMS error")
    elif args.kind == "tail":
        curve = read_curve_csv(args.input)
        mask = curve.p_hat > 0
        loglog_svg(args.out, [{"x": curve.u[mask].tolist(),
                               "y": curve.p_hat[mask].tolist(),
                               "label": "exceedance"}],
                   title="tail exceedance", xlabel="u", ylabel="P(deviation > u)")
    else:
        data = np.genfromtxt(args.input, delimiter=",", names=True)
        if "x_1" not in (data.dtype.names or ()) or "f_ww" not in data.dtype.names:
            raise ContractViolation("density plots need columns x_1 and f_ww")
        series = [{"x": np.atleast_1d(data["x_1"]).tolist(),
                   "y": np.atleast_1d(data["f_ww"]).tolist(), "label": "f_ww"}]
        if "f_pr" in data.dtype.names:
            series.append({"x": np.atleast_1d(data["x_1"]).tolist(),
                           "y": np.atleast_1d(data["f_pr"]).tolist(), "label": "f_pr"})
        line_svg(args.out, series, title="density estimate", xlabel="x", ylabel="density")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wwkde",
                                     description="Recursive kernel density estimation, "
                                                 "tail bounds, and Monte Carlo verification")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-kernel", help="check kernel conditions by quadrature")
    p.add_argument("--family", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--nodes", type=int, default=64)
    p.add_argument("--truncation-radius", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-moment-order", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_validate_kernel)

    p = sub.add_parser("estimate", help="estimate a density from a samples CSV")
    p.add_argument("--samples", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kernel", default="epanechnikov")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--grid-min", required=True)
    p.add_argument("--grid-max", required=True)
    p.add_argument("--grid-points", default="200")
    p.add_argument("--pr-bandwidth", default=None,
                   help="add a Parzen-Rosenblatt column (number or 'auto')")
    p.set_defaults(handler=_cmd_estimate)

    p = sub.add_parser("ci", help="pointwise confidence radius from the tail bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c4", type=float, default=1.0)
    p.add_argument("--c3", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_ci)

    for name, handler in (("rate-experiment", _cmd_rate_experiment),
                          ("tail-experiment", _cmd_tail_experiment)):
        p = sub.add_parser(name, help=f"run a seeded {name.split('-')[0]} experiment")
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--plot", action="store_true")
        p.set_defaults(handler=handler)

    p = sub.add_parser("calibrate", help="calibrate the tail-bound constant from a curve CSV")
    p.add_argument("--curve", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c-max", type=float, default=1e6)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_calibrate)

    p = sub.add_parser("plot", help="render a report CSV as an SVG log-log plot")
    p.add_argument("--kind", choices=("rate", "tail", "density"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--theory-slope", type=float, default=None)
    p.set_defaults(handler=_cmd_plot)
    return parser


def dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "workers", None) is None and hasattr(args, "workers"):
        args.workers = default_workers()
    try:
        return args.handler(args)
    except (ContractViolation, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
