"""Command-line front end.

Subcommands:
  run            closed-loop scenario -> series.csv, metrics.json,
                 certificate.json, response.png, trajectory.png
  sweep          cartesian sweep over scenario overrides -> per-case
                 artifacts + summary.csv
  collision-map  export the (phi1, phi2) collide/clear grid (CSV + PGM + PNG)
  gamma-max      sweep the safe amplitude-ratio limit for a tail shape
  certify        check one cycle's tail commands against a configuration
  fit            parameter fits from CSV (drag decay, thrust slopes)
  validate       parse a scenario and/or configuration, report problems

Exit codes: 0 success, 2 validation/input error, 3 certificate failure
(artifacts are still written on 3).  Errors are emitted on stderr as a
single JSON object: {"error": {"kind", "detail", "problems"}}.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .collision import (
    DEFAULT_TAIL,
    GAMMA_SAFE_LIMIT,
    CollisionError,
    TailShape,
    certify_no_undock,
    collision_space,
    connected_components,
    front_back_offset,
    max_safe_gamma,
    side_offset,
)
from .control import wrap_angle
from .hydro import (
    DragFitError,
    alpha_from_slopes,
    fit_drag_from_decay,
    fit_shared_intercept_slopes,
    gamma_from_alpha,
)
from .lattice import LatticeError, lattice_from_dict
from .report import (
    save_collision_map_figure,
    save_fit_figure,
    save_gamma_sweep_figure,
    save_response_figure,
    save_trajectory_figure,
)
from .scenario import ScenarioError, load_scenario, parse_scenario
from .sim import SERIES_COLUMNS, run_scenario, speed_step_metrics, yaw_step_metrics
from .waveform import PERIOD, TailCommand

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CERTIFICATE = 3

SETTLING_WINDOW_NOTE = "RMS from first 0.9-step crossing to end of run"


def _fail(kind: str, detail: str, problems=None) -> None:
    payload = {"error": {"kind": kind, "detail": detail}}
    if problems:
        payload["error"]["problems"] = list(problems)
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, sort_keys=True, indent=2, allow_nan=False))
        fh.write("\n")


def _write_series_csv(path, series) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(SERIES_COLUMNS) + "\n")
        n = series["t_s"].size
        cols = [series[name] for name in SERIES_COLUMNS]
        for i in range(n):
            fh.write(",".join(repr(float(c[i])) for c in cols) + "\n")


def _finite_or_none(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


# ---------------------------------------------------------------------------
# run

def _build_metrics(scn, result, seed: int, scenario_path: str) -> dict:
    t = result.series["t_s"]
    speed_metrics = None
    if scn.mode != "yaw-only":
        v0 = float(result.series["v_surge_mps"][0])
        v_target = scn.targets.surge_speed
        if abs(v_target - v0) > 1e-12:
            speed_metrics = speed_step_metrics(
                t, result.series["v_surge_mps"], v0, v_target
            )
    yaw_metrics = None
    if scn.mode != "velocity-only":
        sel = t >= scn.targets.yaw_step_time - 1e-12
        if sel.any():
            tt = t[sel]
            yy = result.series["yaw_rad"][sel]
            if abs(wrap_angle(scn.targets.yaw - float(yy[0]))) > 1e-12:
                yaw_metrics = yaw_step_metrics(tt, yy, scn.targets.yaw)

    fs = result.final_state
    return {
        "scenario_path": scenario_path,
        "scenario_sha256": scn.sha256,
        "seed": seed,
        "mode": scn.mode,
        "cycles": result.cycles,
        "period_s": result.period,
        "dt_s": result.dt,
        "speed_step": speed_metrics,
        "yaw_step": yaw_metrics,
        "settling_window": SETTLING_WINDOW_NOTE,
        "certificates": {
            "count": len(result.certificates),
            "failures": result.certificate_failures,
            "collisions": result.collisions,
            "min_clearance_m": _finite_or_none(result.min_clearance),
        },
        "saturation_events": result.saturation_events,
        "final_state": {
            "x_m": fs.x,
            "y_m": fs.y,
            "yaw_rad": fs.yaw,
            "v_surge_mps": fs.v_surge,
            "v_sway_mps": fs.v_sway,
            "yaw_rate_radps": fs.yaw_rate,
        },
    }


def _certificate_report(result) -> dict:
    return {
        "summary": {
            "count": len(result.certificates),
            "failures": result.certificate_failures,
            "collisions": result.collisions,
            "min_clearance_m": _finite_or_none(result.min_clearance),
            "ok": result.certificate_failures == 0,
        },
        "cycles": [
            dict(c.as_dict(), t_start_s=t0)
            for t0, c in zip(result.cycle_start_times, result.certificates)
        ],
    }


def cmd_run(args) -> int:
    try:
        scn = load_scenario(args.scenario)
    except ScenarioError as exc:
        _fail("validation", f"invalid scenario {args.scenario}", exc.problems)
        return EXIT_VALIDATION
    except OSError as exc:
        _fail("io", str(exc))
        return EXIT_VALIDATION
    if args.samples_per_cycle is not None:
        if args.samples_per_cycle < 720:
            _fail("validation", "--samples-per-cycle must be >= 720")
            return EXIT_VALIDATION
        scn = replace(scn, samples_per_cycle=args.samples_per_cycle)
    seed = scn.seed if args.seed is None else args.seed

    result = run_scenario(scn)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_series_csv(out / "series.csv", result.series)
    _write_json(out / "metrics.json", _build_metrics(scn, result, seed, str(args.scenario)))
    _write_json(out / "certificate.json", _certificate_report(result))
    if not args.no_figures:
        save_response_figure(result, scn, out / "response.png")
        save_trajectory_figure(result, scn, out / "trajectory.png")

    if result.certificate_failures:
        _fail(
            "certificate",
            f"{result.certificate_failures} of {len(result.certificates)} cycles "
            f"failed certification (artifacts written to {out})",
        )
        return EXIT_CERTIFICATE
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep

def _set_dotted(d: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    cur = d
    for k in keys[:-1]:
        nxt = cur.get(k)
        if not isinstance(nxt, dict):
            nxt = {}
            cur[k] = nxt
        cur = nxt
    cur[keys[-1]] = value


def cmd_sweep(args) -> int:
    manifest_path = Path(args.manifest)
    try:
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail("io", f"cannot read manifest {manifest_path}: {exc}")
        return EXIT_VALIDATION
    if not isinstance(manifest, dict) or "base" not in manifest:
        _fail("validation", "manifest must be an object with 'base' and 'axes'")
        return EXIT_VALIDATION
    base = manifest["base"]
    axes = manifest.get("axes", {})
    unknown = set(manifest) - {"base", "axes"}
    if unknown:
        _fail("validation", f"unknown manifest keys: {sorted(unknown)}")
        return EXIT_VALIDATION
    if not isinstance(axes, dict) or not all(isinstance(v, list) for v in axes.values()):
        _fail("validation", "axes must map dotted scenario keys to lists of values")
        return EXIT_VALIDATION

    base_dir = manifest_path.parent
    if isinstance(base, str):
        base_path = Path(base)
        if not base_path.is_absolute():
            base_path = base_dir / base_path
        try:
            with open(base_path, "r", encoding="utf-8") as fh:
                base_raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            _fail("io", f"cannot read base scenario {base_path}: {exc}")
            return EXIT_VALIDATION
        scenario_dir = base_path.parent
    elif isinstance(base, dict):
        base_raw = base
        scenario_dir = base_dir
    else:
        _fail("validation", "'base' must be a path or an inline scenario object")
        return EXIT_VALIDATION

    keys = sorted(axes)
    combos = list(itertools.product(*(axes[k] for k in keys))) if keys else [()]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    summary_rows = []
    problems_total = 0
    for i, combo in enumerate(combos):
        raw = json.loads(json.dumps(base_raw))
        for k, v in zip(keys, combo):
            _set_dotted(raw, k, v)
        case = f"case_{i:03d}"
        case_dir = out / case
        case_dir.mkdir(parents=True, exist_ok=True)
        row = {"case": case}
        row.update({k: combo[j] for j, k in enumerate(keys)})
        try:
            scn = parse_scenario(raw, base_dir=scenario_dir)
        except ScenarioError as exc:
            problems_total += 1
            row.update({"ok": 0, "detail": "; ".join(exc.problems)})
            summary_rows.append(row)
            continue
        result = run_scenario(scn)
        _write_series_csv(case_dir / "series.csv", result.series)
        metrics = _build_metrics(scn, result, scn.seed, case)
        _write_json(case_dir / "metrics.json", metrics)
        _write_json(case_dir / "certificate.json", _certificate_report(result))
        sp = metrics["speed_step"] or {}
        yw = metrics["yaw_step"] or {}
        row.update(
            {
                "ok": 1,
                "scenario_sha256": scn.sha256,
                "speed_rise_s": sp.get("rise_time_s"),
                "speed_final_error": sp.get("final_error"),
                "yaw_rise_s": yw.get("rise_time_s"),
                "yaw_final_error": yw.get("final_error"),
                "certificate_failures": result.certificate_failures,
                "min_clearance_m": _finite_or_none(result.min_clearance),
            }
        )
        summary_rows.append(row)

    header: list = []
    for row in summary_rows:
        for k in row:
            if k not in header:
                header.append(k)
    with open(out / "summary.csv", "w", encoding="utf-8") as fh:
        fh.write(",".join(str(h) for h in header) + "\n")
        for row in summary_rows:
            vals = []
            for h in header:
                v = row.get(h)
                if v is None:
                    vals.append("")
                elif isinstance(v, float):
                    vals.append(repr(v))
                else:
                    vals.append(str(v))
            fh.write(",".join(vals) + "\n")
    print(json.dumps({"cases": len(combos), "failed_validation": problems_total}))
    return EXIT_OK if problems_total == 0 else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# collision-map / gamma-max / certify

def _shape_from_args(args) -> TailShape:
    return TailShape(
        body_radius=args.body_radius,
        tip_len=args.tip_len,
        tip_halfwidth=args.tip_halfwidth,
    )


def cmd_collision_map(args) -> int:
    try:
        shape = _shape_from_args(args)
    except CollisionError as exc:
        _fail("validation", str(exc))
        return EXIT_VALIDATION
    pitch = 2.0 * shape.body_radius if args.pitch is None else args.pitch
    offset = front_back_offset(pitch) if args.pair == "front-back" else side_offset(pitch)
    try:
        space = collision_space(shape, offset, resolution=args.resolution)
    except CollisionError as exc:
        _fail("validation", str(exc))
        return EXIT_VALIDATION
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    space.to_csv(out / "collision_map.csv")
    space.to_pgm(out / "collision_map.pgm")
    if not args.no_figures:
        save_collision_map_figure(space, out / "collision_map.png")
    ncomp, _ = connected_components(space.collides)
    summary = {
        "pair": args.pair,
        "resolution_rad": space.resolution,
        "cells": int(space.collides.size),
        "collide_cells": int(space.collides.sum()),
        "components": ncomp,
    }
    _write_json(out / "collision_map_summary.json", summary)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def cmd_gamma_max(args) -> int:
    try:
        shape = _shape_from_args(args)
        bound = None if args.no_amplitude_bound else args.amplitude_bound
        search = max_safe_gamma(shape, args.resolution, amplitude_bound=bound,
                                pitch=args.pitch)
    except CollisionError as exc:
        _fail("validation", str(exc))
        return EXIT_VALIDATION
    report = {
        "gamma_max": search.gamma_max,
        "constrained": search.constrained,
        "amplitude_bound_rad": search.amplitude_bound,
        "resolution": search.resolution,
        "evaluations": len(search.trace),
        "bracket": list(search.bracket) if search.bracket else None,
        "note": None if search.constrained else
                "no collision up to the sweep cap; value is the cap, not a limit",
    }
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "gamma_max.json", report)
        if not args.no_figures:
            save_gamma_sweep_figure(search, out / "gamma_sweep.png")
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


def cmd_certify(args) -> int:
    try:
        with open(args.commands, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail("io", f"cannot read commands file {args.commands}: {exc}")
        return EXIT_VALIDATION
    if not isinstance(data, dict):
        _fail("validation", "commands file must be a JSON object")
        return EXIT_VALIDATION
    problems = []
    conf = data.get("configuration")
    if conf is None:
        problems.append("missing 'configuration'")
    cmds_raw = data.get("commands")
    if not isinstance(cmds_raw, list) or not cmds_raw:
        problems.append("missing or empty 'commands' list")
    unknown = set(data) - {"configuration", "commands", "omega", "declared_gamma", "notes"}
    if unknown:
        problems.append(f"unknown keys: {sorted(unknown)}")
    if problems:
        _fail("validation", "invalid commands file", problems)
        return EXIT_VALIDATION
    if isinstance(conf, str):
        path = Path(conf)
        if not path.is_absolute():
            path = Path(args.commands).parent / path
        try:
            with open(path, "r", encoding="utf-8") as fh:
                conf = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            _fail("io", f"cannot read configuration {path}: {exc}")
            return EXIT_VALIDATION
    try:
        lat = lattice_from_dict(conf)
    except LatticeError as exc:
        _fail("validation", str(exc))
        return EXIT_VALIDATION
    omega = data.get("omega", 2.0 * math.pi / PERIOD)
    commands = []
    for i, c in enumerate(cmds_raw):
        if not isinstance(c, dict) or "amplitude" not in c:
            _fail("validation", f"command {i} must be an object with 'amplitude'")
            return EXIT_VALIDATION
        commands.append(
            TailCommand(
                centerline=float(c.get("centerline", 0.0)),
                amplitude=float(c["amplitude"]),
                omega=float(c.get("omega", omega)),
            )
        )
    try:
        cert = certify_no_undock(
            lat,
            commands,
            samples_per_cycle=args.samples_per_cycle,
            gamma_limit=args.gamma_limit,
            declared_gamma=data.get("declared_gamma"),
        )
    except (CollisionError, ValueError) as exc:
        _fail("validation", str(exc))
        return EXIT_VALIDATION
    report = cert.as_dict()
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "certificate.json", report)
    print(json.dumps(report, sort_keys=True))
    if not cert.ok:
        _fail("certificate", "command set failed certification")
        return EXIT_CERTIFICATE
    return EXIT_OK


# ---------------------------------------------------------------------------
# fit

_FIT_SCHEMAS = {
    "drag-linear": ("t_s", "v_mps"),
    "drag-angular": ("t_s", "omega_radps"),
    "alpha": ("amplitude", "thrust", "group"),
}


def _read_fit_csv(path, columns):
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DragFitError(f"{path}: empty file") from None
        if [h.strip() for h in header] != list(columns):
            raise DragFitError(
                f"{path}: expected header {','.join(columns)}, got {','.join(header)}"
            )
        for ln, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(columns):
                raise DragFitError(f"{path}:{ln}: expected {len(columns)} fields")
            try:
                rows.append([float(x) for x in row])
            except ValueError:
                raise DragFitError(f"{path}:{ln}: non-numeric value") from None
    if not rows:
        raise DragFitError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def cmd_fit(args) -> int:
    columns = _FIT_SCHEMAS[args.kind]
    try:
        data = _read_fit_csv(args.input, columns)
    except DragFitError as exc:
        _fail("validation", str(exc))
        return EXIT_VALIDATION

    try:
        if args.kind in ("drag-linear", "drag-angular"):
            scale_name = "mass_kg" if args.kind == "drag-linear" else "inertia_kgm2"
            scale = args.mass if args.kind == "drag-linear" else args.inertia
            if scale is None:
                flag = "--mass" if args.kind == "drag-linear" else "--inertia"
                _fail("validation", f"{args.kind} requires {flag}")
                return EXIT_VALIDATION
            t = data[:, 0]
            v = data[:, 1]
            coeff = fit_drag_from_decay(t, v, scale)
            rate = coeff / scale
            # refit the 1/v intercept for display; exact when noiseless
            u = float(np.mean(1.0 / v - rate * t))
            fitted = 1.0 / (u + rate * t)
            resid = v - fitted
            unit = "kg_per_m" if args.kind == "drag-linear" else "kgm2"
            report = {
                "kind": args.kind,
                f"coefficient_{unit}": coeff,
                scale_name: scale,
                "samples": int(t.size),
                "residual_rms": float(math.sqrt(np.mean(resid**2))),
                "converged": True,
            }
            ylabel = "speed (m/s)" if args.kind == "drag-linear" else "spin rate (rad/s)"
            fig_args = (t, v, fitted)
            fig_kwargs = {"ylabel": ylabel}
        else:
            amps = data[:, 0]
            thrusts = data[:, 1]
            groups = data[:, 2]
            if not np.all(groups == np.round(groups)):
                _fail("validation", "group labels must be integers")
                return EXIT_VALIDATION
            groups = groups.astype(int)
            intercept, slopes = fit_shared_intercept_slopes(amps, thrusts, groups)
            order = sorted(slopes)
            slope_list = [slopes[g] for g in order]
            alpha = alpha_from_slopes(slope_list)
            gamma = gamma_from_alpha(alpha)
            fitted = np.array(
                [slopes[g] * (a - intercept) for a, g in zip(amps, groups)]
            )
            resid = thrusts - fitted
            report = {
                "kind": "alpha",
                "intercept_rad": intercept,
                "slopes": {str(g): slopes[g] for g in order},
                "alpha": list(alpha),
                "gamma": list(gamma),
                "samples": int(amps.size),
                "residual_rms": float(math.sqrt(np.mean(resid**2))),
                "converged": True,
            }
            fig_args = (amps, thrusts, fitted)
            fig_kwargs = {
                "ylabel": "cycle-averaged thrust (N)",
                "xlabel": "amplitude (rad)",
                "groups": groups,
            }
    except DragFitError as exc:
        _fail("fit", str(exc))
        return EXIT_VALIDATION

    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "fit.json", report)
        if not args.no_figures:
            save_fit_figure(*fig_args, out / "fit.png", **fig_kwargs)
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate

def cmd_validate(args) -> int:
    if args.scenario is None and args.config is None:
        _fail("validation", "give --scenario and/or --config to validate")
        return EXIT_VALIDATION
    report = {}
    problems = []
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                lat = lattice_from_dict(json.load(fh))
            report["config"] = {
                "ok": True,
                "modules": lat.n,
                "pitch_m": lat.pitch,
            }
        except (OSError, json.JSONDecodeError, LatticeError) as exc:
            problems.append(f"config: {exc}")
    if args.scenario is not None:
        try:
            scn = load_scenario(args.scenario)
            report["scenario"] = {
                "ok": True,
                "scenario_sha256": scn.sha256,
                "mode": scn.mode,
                "modules": scn.lattice.n,
                "cycles": math.ceil(scn.duration / scn.period - 1e-9),
            }
        except ScenarioError as exc:
            problems.extend(exc.problems)
        except OSError as exc:
            problems.append(str(exc))
    if problems:
        _fail("validation", "validation failed", problems)
        return EXIT_VALIDATION
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _add_shape_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--body-radius", type=float, default=DEFAULT_TAIL.body_radius,
                   help="tail body radius, m")
    p.add_argument("--tip-len", type=float, default=DEFAULT_TAIL.tip_len,
                   help="tip protrusion beyond the body radius, m")
    p.add_argument("--tip-halfwidth", type=float, default=DEFAULT_TAIL.tip_halfwidth,
                   help="angular half-width of the tip taper, rad")
    p.add_argument("--pitch", type=float, default=None,
                   help="neighbor center distance, m (default 2*body radius)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="raftsim",
        description="Closed-loop raft simulation, collision certification, and fits.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario and write artifacts")
    p.add_argument("--scenario", required=True, help="scenario JSON path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override recorded seed")
    p.add_argument("--samples-per-cycle", type=int, default=None,
                   help="override certificate sampling density (>= 720)")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="cartesian sweep over scenario overrides")
    p.add_argument("--manifest", required=True,
                   help="JSON {base: scenario path|object, axes: {dotted.key: [values]}}")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("collision-map", help="export the collide/clear grid")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--resolution", type=float, default=0.02, help="cell size, rad")
    p.add_argument("--pair", choices=("front-back", "side"), default="front-back")
    p.add_argument("--no-figures", action="store_true")
    _add_shape_args(p)
    p.set_defaults(func=cmd_collision_map)

    p = sub.add_parser("gamma-max", help="find the safe amplitude-ratio limit")
    p.add_argument("--resolution", type=float, default=1e-3,
                   help="bisection resolution on the ratio")
    p.add_argument("--amplitude-bound", type=float, default=2.5,
                   help="amplitude cap for the swept trajectory, rad")
    p.add_argument("--no-amplitude-bound", action="store_true",
                   help="sweep the unbounded through-origin line instead")
    p.add_argument("--out", default=None, help="optional output directory")
    p.add_argument("--no-figures", action="store_true")
    _add_shape_args(p)
    p.set_defaults(func=cmd_gamma_max)

    p = sub.add_parser("certify", help="certify one cycle's tail commands")
    p.add_argument("--commands", required=True,
                   help="JSON {configuration, commands: [{centerline, amplitude}], "
                        "omega?, declared_gamma?}")
    p.add_argument("--samples-per-cycle", type=int, default=720)
    p.add_argument("--gamma-limit", type=float, default=GAMMA_SAFE_LIMIT)
    p.add_argument("--out", default=None, help="optional output directory")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("fit", help="fit drag or thrust-slope parameters from CSV")
    p.add_argument("--kind", required=True, choices=sorted(_FIT_SCHEMAS))
    p.add_argument("--input", required=True, help="input CSV path")
    p.add_argument("--mass", type=float, default=None, help="body mass, kg (drag-linear)")
    p.add_argument("--inertia", type=float, default=None,
                   help="body yaw inertia, kg m^2 (drag-angular)")
    p.add_argument("--out", default=None, help="optional output directory")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("validate", help="validate scenario/configuration files")
    p.add_argument("--scenario", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_validate)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
