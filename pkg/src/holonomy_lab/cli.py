"""Command-line front end: evolve, sweep, verify.

Exit codes: 0 success, 1 numerical/invariant failure, 2 usage or config
error. Machine-readable output goes to --out or stdout; human-readable
progress goes to stderr and is silenced by --quiet.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import spin_model, sweep as sweep_mod, verify as verify_mod
from .config import RunConfig, build_config, load_config, tolerance_overrides
from .errors import ConfigError
from .evolution import TimeGrid, fidelity, propagate
from .phases import circular_distance, cyclic_geometric_phase, mod_two_pi
from .tolerances import DEFAULT

__all__ = ["main"]


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _emit(args, text: str) -> None:
    out = args.out
    if out is None and args.config_mapping.get("output.path"):
        out = args.config_mapping["output.path"]
    if out:
        Path(out).write_text(text)
        _say(args, f"wrote {out}")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _build_config(args, *, need_config: bool) -> RunConfig:
    mapping = load_config(args.config) if args.config else {}
    args.config_mapping = mapping
    if need_config and not mapping:
        raise ConfigError("this command needs --config with at least theta and omega or eta")
    return build_config(
        mapping,
        steps=args.steps,
        output_path=args.out,
        output_format=args.format,
    )


def cmd_evolve(args) -> int:
    config = _build_config(args, need_config=True)
    eta = config.require_single_point()
    tol = config.tolerances()
    params = spin_model.ModelParams.from_eta(
        theta=config.theta, eta=eta, mu=config.mu, b_field=config.b_field, hbar=config.hbar
    )
    steps = config.steps + (config.steps % 2)
    grid = TimeGrid(t_end=config.n_periods * params.period, steps=steps)
    sched = spin_model.schedule(params)
    psi0 = spin_model.exact_solution(params, +1, 0.0)
    traj = propagate(sched, psi0, grid, hbar=config.hbar, tol=tol)

    err_estimate = spin_model.midpoint_phase_error_estimate(params, steps, config.n_periods)
    route_tol = max(tol.two_route, 6.0 * err_estimate)
    report = cyclic_geometric_phase(traj, sched, hbar=config.hbar, two_route_tol=route_tol, tol=tol)

    exact = spin_model.exact_trajectory(params, +1, grid)
    fid = fidelity(traj, exact)
    exact_geom = mod_two_pi(config.n_periods * 2.0 * np.pi * spin_model.connection_rate(params, +1) / params.omega)
    tilt = spin_model.tilt_angle(params)
    payload = {
        "model": {
            "theta": params.theta,
            "mu": params.mu,
            "b_field": params.b_field,
            "omega": params.omega,
            "eta": params.eta,
            "hbar": params.hbar,
            "n_periods": config.n_periods,
            "steps": steps,
            "tilt_alpha": tilt.alpha,
            "tilt_branch_denominator_negative": tilt.denominator_negative,
        },
        "trajectory": {
            "t_end": grid.t_end,
            "steps": grid.steps,
            "norm_drift": traj.norm_drift(),
            "endpoint_overlap_modulus": report.endpoint_overlap_modulus,
        },
        "phase_report": asdict(report),
        "fidelity_vs_exact": fid,
        "geometric_phase_exact": exact_geom,
        "deviation_from_exact": circular_distance(report.geometric, exact_geom),
    }
    if config.output_format == "json":
        _emit(args, json.dumps(payload, indent=2))
    else:
        cols = (
            "eta", "theta", "alpha", "total", "dynamical", "geometric",
            "geometric_exact", "deviation_from_exact", "fidelity_vs_exact", "steps_used",
        )
        vals = (
            params.eta, params.theta, tilt.alpha, report.total, report.dynamical,
            report.geometric, exact_geom, payload["deviation_from_exact"], fid, steps,
        )
        lines = [sweep_mod.CSV_BANNER, ",".join(cols), ",".join(sweep_mod.csv_value(v) for v in vals)]
        _emit(args, "\n".join(lines) + "\n")
    _say(
        args,
        f"geometric phase {report.geometric:.9f} rad "
        f"(exact {exact_geom:.9f}, deviation {payload['deviation_from_exact']:.3e}), "
        f"fidelity {fid:.12f}",
    )
    return 0


def cmd_sweep(args) -> int:
    config = _build_config(args, need_config=True)
    if config.sweep is None:
        raise ConfigError("sweep command needs sweep.eta_min, sweep.eta_max, sweep.points")
    tol = config.tolerances()
    etas = sweep_mod.eta_grid(
        config.sweep.eta_min, config.sweep.eta_max, config.sweep.points, log=config.sweep.log
    )
    rows = sweep_mod.run_sweep(
        config.theta,
        etas,
        mu=config.mu,
        b_field=config.b_field,
        hbar=config.hbar,
        base_steps=config.steps,
        n_periods=config.n_periods,
        deviation_target=tol.sweep_deviation,
        tol=tol,
    )
    text = sweep_mod.rows_to_csv(rows) if config.output_format == "csv" else sweep_mod.rows_to_json(rows)
    _emit(args, text)
    n_bad = sum(r.status != "ok" for r in rows)
    _say(args, f"{len(rows)} rows, {n_bad} failed")
    return 0


def cmd_verify(args) -> int:
    # verify accepts either a full run config or a tolerance-only one
    tol = DEFAULT
    if args.config:
        mapping = load_config(args.config)
        args.config_mapping = mapping
        if any(not key.startswith("tol.") for key in mapping):
            tol = build_config(mapping).tolerances()
        else:
            tol = DEFAULT.replace(**tolerance_overrides(mapping))
    results = verify_mod.run_suite(tol=tol, quick=args.quick, seed=args.seed)
    _emit(args, verify_mod.render_report(results) + "\n")
    return 0 if all(r.passed for r in results) else 1


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holonomy-lab",
        description="Geometric phases of driven finite-dimensional quantum systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = (
        ("evolve", cmd_evolve, "propagate one run and report its phase decomposition"),
        ("sweep", cmd_sweep, "sweep eta and tabulate geometric phases (CSV/JSON)"),
        ("verify", cmd_verify, "run the full invariant suite and report pass/fail"),
    )
    for name, fn, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="key = value or JSON config file")
        p.add_argument("--out", metavar="PATH", help="write machine-readable output here")
        p.add_argument("--format", choices=("csv", "json"), default=None, help="output format")
        p.add_argument("--steps", type=int, default=None, help="override grid steps")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized gauge checks")
        p.add_argument("--quiet", action="store_true", help="suppress progress messages")
        if name == "verify":
            p.add_argument("--quick", action="store_true", help="reduced, faster check suite")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    args.config_mapping = {}
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
