"""Command-line front end: JSON reports and CSV tables for every check.

Subcommands: validate | subsolution | energy | burgers | residual | viscosity
| boundary.  Configuration is a JSON object with flat dotted keys (see
``DEFAULT_CONFIG``); every key can be overridden on the command line by a flag
of the same name.  Exit codes: 0 all checks pass, 1 a check failed, 2 for
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, boundary_layer, burgers, subsolution, viscosity, weakform
from .geometry import AnnulusGeometry, SubsolutionParams, validate_params
from .subsolution import check_constraint_structure, sample_columns

DEFAULT_CONFIG = {
    "geometry.rho": 1.0,
    "geometry.R": 2.0,
    "geometry.r0": 1.5,
    "geometry.T": 1.0,
    "params.lambda": 0.1,
    "params.epsilon": 0.5,
    "grids.n_r": 50,
    "grids.n_theta": 32,
    "grids.n_t": 5,
    "energy.n_times": 9,
    "burgers.t": 0.5,
    "burgers.n_cells": [2000, 4000, 8000, 16000],
    "residual.levels": 3,
    "residual.order": 3,
    "residual.fd_points": 200,
    "residual.fd_h": 1e-3,
    "viscosity.nu": [1e-2, 1e-3, 1e-4],
    "viscosity.t_probe": 1.0,
    "viscosity.n": 1600,
    "viscosity.dt": 0.0025,
    "boundary.holder_alpha": 0.5,
    "boundary.eps": [0.04, 0.02, 0.01, 0.005],
    "seed": 0,
}

REQUIRED_KEYS = (
    "geometry.rho",
    "geometry.R",
    "geometry.r0",
    "geometry.T",
    "params.lambda",
    "params.epsilon",
)

_INT_KEYS = {
    "grids.n_r", "grids.n_theta", "grids.n_t", "energy.n_times",
    "residual.levels", "residual.fd_points", "residual.order",
    "viscosity.n", "seed",
}
_LIST_KEYS = {"burgers.n_cells", "viscosity.nu", "boundary.eps"}

COMMANDS = ("validate", "subsolution", "energy", "burgers", "residual", "viscosity", "boundary")


class ConfigError(Exception):
    """Malformed configuration: unknown key, bad type, missing required field."""


def _coerce(key: str, value):
    try:
        if key in _LIST_KEYS:
            if isinstance(value, str):
                value = [v for v in value.split(",") if v]
            seq = [float(v) for v in value]
            if key == "burgers.n_cells":
                return [int(v) for v in seq]
            return seq
        if key in _INT_KEYS:
            out = int(float(value))
            if out != float(value):
                raise ValueError(f"{value} is not an integer")
            return out
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})") from exc


def load_config(path=None, overrides=None) -> dict:
    """Merge defaults, an optional JSON config file, and CLI overrides.

    A config file must carry at least the geometry.* and params.* keys and may
    not contain unknown ones; all remaining keys fall back to defaults.
    """
    config = dict(DEFAULT_CONFIG)
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object with dotted keys")
        unknown = sorted(set(raw) - set(DEFAULT_CONFIG))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        missing = sorted(set(REQUIRED_KEYS) - set(raw))
        if missing:
            raise ConfigError(f"config file is missing required keys: {', '.join(missing)}")
        config.update(raw)
    for key, value in (overrides or {}).items():
        config[key] = value
    return {key: _coerce(key, value) for key, value in config.items()}


def _geometry(config) -> AnnulusGeometry:
    try:
        return AnnulusGeometry(
            rho=config["geometry.rho"],
            R=config["geometry.R"],
            r0=config["geometry.r0"],
            T=config["geometry.T"],
        )
    except ValueError as exc:
        raise ConfigError(f"invalid geometry: {exc}") from exc


def _params(config) -> SubsolutionParams:
    try:
        return SubsolutionParams(lam=config["params.lambda"], epsilon=config["params.epsilon"])
    except ValueError as exc:
        raise ConfigError(f"invalid parameters: {exc}") from exc


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_report(out_dir: Path, name: str, report: dict):
    with open(out_dir / f"{name}.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_validate(config, out_dir: Path):
    geom = _geometry(config)
    params = _params(config)
    report = validate_params(geom, params)
    payload = {
        "lambda": params.lam,
        "epsilon": params.epsilon,
        "lambda_bound": report.lambda_bound,
        "epsilon_bound": report.epsilon_bound,
        "epsilon_strict": report.epsilon_strict,
        "violations": [
            {"name": v.name, "value": v.value, "bound": v.bound, "description": v.description}
            for v in report.violations
        ],
        "ok": report.ok,
    }
    if report.ok and not report.epsilon_strict:
        payload["warning"] = "epsilon >= 1: the energy gap inside the band is not strict"
    for violation in report.violations:
        print(f"violated: {violation.description} (value {violation.value}, bound {violation.bound})")
    print(f"validate: {'PASS' if report.ok else 'FAIL'}")
    return (0 if report.ok else 1), payload


def cmd_subsolution(config, out_dir: Path):
    geom = _geometry(config)
    params = _params(config)
    n_r, n_theta, n_t = config["grids.n_r"], config["grids.n_theta"], config["grids.n_t"]
    r = geom.rho + (np.arange(n_r) + 0.5) * geom.width / n_r
    theta = np.arange(n_theta) * (2.0 * np.pi / n_theta)
    t = np.linspace(0.0, geom.T, n_t)
    columns = sample_columns(geom, params, r, theta, t)
    header = ["r", "theta", "t", "f", "alpha", "beta", "gamma", "qbar",
              "vbar_x", "vbar_y", "u11", "u12", "egen", "ebar", "in_U"]
    write_csv(out_dir / "subsolution.csv", header, zip(*(columns[k] for k in header)))

    check = check_constraint_structure(geom, params, n_r=n_r, n_theta=n_theta, n_t=n_t)
    payload = {
        "n_samples": check.n_samples,
        "n_in_band": check.n_in_band,
        "strictness_applicable": check.strictness_applicable,
        "min_gap_in_band": check.min_gap_in_band,
        "max_gap_formula_dev": check.max_gap_formula_dev,
        "max_eq_dev_outside": check.max_eq_dev_outside,
        "first_violation": check.first_violation,
        "ok": check.ok,
    }
    print(f"subsolution constraint check: {'PASS' if check.ok else 'FAIL'}")
    return (0 if check.ok else 1), payload


def cmd_energy(config, out_dir: Path):
    geom = _geometry(config)
    params = _params(config)
    times = np.linspace(0.0, geom.T, config["energy.n_times"])
    energies = weakform.energy_series(geom, params, times)
    e0 = weakform.initial_energy(geom)
    rows = [(tv, ev, e0, e0 - ev) for tv, ev in zip(times, energies)]
    write_csv(out_dir / "energy.csv", ["t", "energy_total", "E0", "deficit"], rows)
    if params.epsilon == 0.0:
        ok = bool(np.max(np.abs(energies - e0)) < 1e-10 * e0)
        behavior = "conserved"
    else:
        ok = bool(np.all(np.diff(energies) < 0.0))
        behavior = "strictly decreasing"
    payload = {
        "E0": e0,
        "times": times.tolist(),
        "energy": energies.tolist(),
        "expected_behavior": behavior,
        "ok": ok,
    }
    print(f"energy ({behavior}): {'PASS' if ok else 'FAIL'}")
    return (0 if ok else 1), payload


def cmd_burgers(config, out_dir: Path):
    geom = _geometry(config)
    params = _params(config)
    t_probe = config["burgers.t"]
    meshes = config["burgers.n_cells"]
    if len(meshes) < 2:
        raise ConfigError("burgers.n_cells needs at least two mesh sizes")
    l1 = []
    linf = []
    in_bounds = True
    for n in meshes:
        err1, err_inf = burgers.compare_exact_vs_fv(geom, params, t_probe, n)
        profile = burgers.godunov_solve(
            lambda r: np.sign(r - geom.r0), geom, params.lam, t_probe, n
        )
        in_bounds = in_bounds and bool(np.all(np.abs(profile.values) <= 1.0 + 1e-12))
        l1.append(err1)
        linf.append(err_inf)
    ratios = [l1[i] / l1[i + 1] for i in range(len(l1) - 1)]
    rows = [
        (meshes[i], l1[i], linf[i], ratios[i - 1] if i > 0 else float("nan"))
        for i in range(len(meshes))
    ]
    write_csv(out_dir / "burgers.csv", ["n_cells", "l1_error", "linf_interior", "l1_ratio"], rows)
    ok = in_bounds and all(1.7 <= ratio <= 2.3 for ratio in ratios)
    payload = {
        "t": t_probe,
        "n_cells": list(meshes),
        "l1_error": l1,
        "linf_interior": linf,
        "l1_ratios": ratios,
        "max_principle_ok": in_bounds,
        "ok": ok,
    }
    print(f"burgers oracle (L1 ratios {['%.2f' % r for r in ratios]}): {'PASS' if ok else 'FAIL'}")
    return (0 if ok else 1), payload


def cmd_residual(config, out_dir: Path):
    geom = _geometry(config)
    params = _params(config)
    rng = np.random.default_rng(config["seed"])
    fields = weakform.default_test_fields(geom, params)
    levels = config["residual.levels"]
    order = config["residual.order"]

    rows = []
    all_ok = True
    field_payload = {}
    for name, phi in fields.items():
        study = weakform.linear_system_refinement(geom, params, phi, levels=levels, order=order)
        all_ok = all_ok and study.converged
        for cells, res in zip(study.levels, study.residuals):
            rows.append((name, "x".join(map(str, cells)), res))
        field_payload[name] = {
            "residuals": study.residuals.tolist(),
            "orders": study.orders.tolist(),
            "converged": study.converged,
        }
    write_csv(out_dir / "residual.csv", ["field", "cells", "residual"], rows)

    scalar = weakform.ScalarBumpField(
        geom,
        (geom.rho + 0.15 * geom.width, geom.R - 0.15 * geom.width),
        weakform.FourierPoly(((0, 1.0, 0.0), (1, 0.4, 0.0), (3, 0.0, 0.2))),
    )
    div_residual = weakform.weak_residual_divergence(
        lambda x, tv: subsolution.vbar(x, tv, geom, params), scalar, geom, t=0.37 * geom.T,
    )
    div_ok = abs(div_residual) < 1e-10

    # independent finite-difference route for the two radial equations
    h = config["residual.fd_h"]
    n_pts = config["residual.fd_points"]
    r_pts, t_pts = weakform.sample_points_away_from_band(geom, params, n_pts, h, rng)
    res_coarse = weakform.radial_system_residual(geom, params, r_pts, t_pts, h=h)
    res_fine = weakform.radial_system_residual(geom, params, r_pts, t_pts, h=h / 2)
    ratios = []
    for coarse, fine in zip(res_coarse, res_fine):
        keep = np.abs(fine) > 1e-13
        ratios.append(float(np.median(np.abs(coarse[keep]) / np.abs(fine[keep]))))
    fd_ok = all(3.5 <= ratio <= 4.5 for ratio in ratios)

    ok = bool(all_ok and div_ok and fd_ok)
    payload = {
        "fields": field_payload,
        "divergence_residual": div_residual,
        "fd_median_ratios": ratios,
        "ok": ok,
    }
    print(f"weak-form residuals: {'PASS' if ok else 'FAIL'}")
    return (0 if ok else 1), payload


def cmd_viscosity(config, out_dir: Path):
    geom = _geometry(config)
    sweep = viscosity.vanishing_viscosity_study(
        geom,
        config["viscosity.nu"],
        config["viscosity.t_probe"],
        n=config["viscosity.n"],
        dt=config["viscosity.dt"],
    )
    rows = list(zip(sweep.nu, sweep.distances))
    write_csv(out_dir / "viscosity.csv", ["nu", "l2_rdr_distance"], rows)
    ok = sweep.monotone
    payload = {
        "nu": sweep.nu.tolist(),
        "distances": sweep.distances.tolist(),
        "t_probe": sweep.t_probe,
        "slope": sweep.slope,
        "ok": ok,
    }
    print(f"viscosity sweep (slope {sweep.slope:.3f}): {'PASS' if ok else 'FAIL'}")
    return (0 if ok else 1), payload


def cmd_boundary(config, out_dir: Path):
    geom = _geometry(config)
    alpha = config["boundary.holder_alpha"]
    chi = boundary_layer.build_chi()
    psi = boundary_layer.SineStreamField(geom)
    v = boundary_layer.HolderVelocity(geom, alpha)
    report = boundary_layer.scaling_study(v, psi, chi, config["boundary.eps"], geom)
    rows = [
        (eps, *vals, cons, dist)
        for eps, vals, cons, dist in zip(
            report.eps, report.I_values, report.consistency, report.l2_distances
        )
    ]
    write_csv(
        out_dir / "boundary.csv",
        ["eps", "I1", "I2", "I3", "I4", "decomposition_error", "l2_distance"],
        rows,
    )
    ok = bool(
        report.slopes_meet_bounds()
        and np.max(report.consistency) < 1e-8
        and report.l2_slope >= 0.5
    )
    payload = {
        "holder_alpha": alpha,
        "eps": report.eps.tolist(),
        "I_values": report.I_values.tolist(),
        "slopes": list(report.slopes),
        "predicted_exponents": list(report.predicted),
        "vacuous": list(report.vacuous),
        "max_decomposition_error": float(np.max(report.consistency)),
        "l2_slope": report.l2_slope,
        "ok": ok,
    }
    slopes_txt = ", ".join("vacuous" if s is None else f"{s:.2f}" for s in report.slopes)
    print(f"boundary-layer slopes ({slopes_txt}): {'PASS' if ok else 'FAIL'}")
    return (0 if ok else 1), payload


_HANDLERS = {
    "validate": cmd_validate,
    "subsolution": cmd_subsolution,
    "energy": cmd_energy,
    "burgers": cmd_burgers,
    "residual": cmd_residual,
    "viscosity": cmd_viscosity,
    "boundary": cmd_boundary,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotsub",
        description="Construct the rotational annulus subsolution and verify its properties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} checks")
        cmd.add_argument("--config", default=None, help="JSON config file with dotted keys")
        cmd.add_argument("--out", default=".", help="output directory for reports and CSV files")
        cmd.add_argument("--seed", type=int, default=None, help="seed for randomized samples")
        for key in DEFAULT_CONFIG:
            if key == "seed":
                continue
            cmd.add_argument(f"--{key}", dest=key, default=None, metavar="VALUE")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key in DEFAULT_CONFIG and value is not None
    }
    if args.seed is not None:
        overrides["seed"] = args.seed
    try:
        config = load_config(args.config, overrides)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        started = time.perf_counter()
        code, payload = _HANDLERS[args.command](config, out_dir)
        report = {
            "command": args.command,
            "results": payload,
            "provenance": {
                "version": __version__,
                "seed": config["seed"],
                "config": config,
                "wall_time_s": time.perf_counter() - started,
            },
        }
        _write_report(out_dir, args.command, report)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
