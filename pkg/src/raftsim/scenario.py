"""Scenario files: a JSON description of one closed-loop run.

Shape (all keys except the first three optional):

    {
      "configuration": {"cells": [[0, 0], [1, 0]]} | "path/to/config.json",
      "mode": "velocity-only" | "yaw-only" | "combined",
      "duration_s": 60,
      "cycle_period_s": 1.5,
      "dt_s": 0.015,
      "gains": {"kp_v": 0.6, "kd_v": 0.1, "kp_yaw": 1.0, "kd_yaw": 0.2},
      "thrust": {"k_f": 0.04, "amp_dead": 0.75, "amp_max": 2.5,
                 "alpha": [1.0, 0.72, 0.67], "gamma": [1.0, 1.49, 1.07]},
      "targets": {"surge_speed_mps": 0.06, "yaw_rad": 1.5708,
                  "yaw_step_time_s": 0.0},
      "initial": {"x_m": 0, "y_m": 0, "yaw_rad": 0, "v_surge_mps": 0,
                  "v_sway_mps": 0, "yaw_rate_radps": 0},
      "drag": {"surge_kg_per_m": 4.67, "yaw_kgm2": 0.0065,
               "sway_kg_per_m": 4.67},
      "limits": {"speed_cmd_max_mps": 0.15},
      "samples_per_cycle": 720,
      "certify": true,
      "thrust_ripple": false,
      "seed": 0,
      "notes": "free text"
    }

Omitting "drag" looks the raft's projected widths up in the bundled drag
table; explicit drag must give surge and yaw (sway defaults to the surge
value).  "thrust" may give "gamma" without "alpha", in which case the
per-rank loss table is derived from the declared compensation ratios.
A "configuration" string is resolved relative to the scenario file.

Parsing collects *all* problems before raising, so a bad file reports
every issue at once.  The scenario hash is the sha256 of the canonical
(sorted-key, compact) JSON encoding of the raw dict as loaded, before any
resolution or defaulting.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .control import MODES, SPEED_CMD_MAX, Gains
from .hydro import BodyParams, DragTableError, drag_lookup, load_drag_table
from .lattice import Lattice, LatticeError, aggregate_inertia, lattice_from_dict, projection_widths
from .sim import BodyState
from .waveform import PERIOD, ThrustModel, ThrustModelError


class ScenarioError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def scenario_sha256(raw: dict) -> str:
    return hashlib.sha256(canonical_json(raw).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class TargetSample:
    surge_speed: float  # m/s
    yaw: float  # rad


@dataclass(frozen=True)
class TargetSchedule:
    surge_speed: float  # m/s
    yaw: float  # rad, target after the step time
    yaw_step_time: float  # s
    yaw_before: float  # rad, held until the step time

    def at(self, t: float) -> TargetSample:
        yaw = self.yaw if t >= self.yaw_step_time - 1e-12 else self.yaw_before
        return TargetSample(self.surge_speed, yaw)


@dataclass(frozen=True)
class Scenario:
    lattice: Lattice
    mode: str
    duration: float  # s
    period: float  # s
    dt: float  # s, requested integrator step
    gains: Gains
    model: ThrustModel
    params: BodyParams
    targets: TargetSchedule
    initial: BodyState
    speed_cmd_max: float  # m/s
    samples_per_cycle: int
    certify: bool
    thrust_ripple: bool
    seed: int
    notes: str
    raw: dict
    sha256: str

    def targets_at(self, t: float) -> TargetSample:
        return self.targets.at(t)


_MISSING = object()


class _Reader:
    """Pop typed keys off a JSON object, collecting problems as we go."""

    def __init__(self, data: dict, ctx: str, problems: list):
        self.data = dict(data)
        self.ctx = ctx
        self.problems = problems

    def take(self, key, default=_MISSING, *, kind=None, required=False):
        if key not in self.data:
            if required:
                self.problems.append(f"{self.ctx}: missing required key {key!r}")
                return None
            return None if default is _MISSING else default
        v = self.data.pop(key)
        if kind is not None and not _is_kind(v, kind):
            self.problems.append(
                f"{self.ctx}: {key!r} has wrong type ({type(v).__name__})"
            )
            return None if default is _MISSING else default
        return v

    def number(self, key, default=_MISSING, *, required=False, minimum=None,
               positive=False):
        v = self.take(key, default, kind=float, required=required)
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            v = float(v)
            if not math.isfinite(v):
                self.problems.append(f"{self.ctx}: {key!r} must be finite")
                return None
            if positive and v <= 0:
                self.problems.append(f"{self.ctx}: {key!r} must be positive, got {v}")
                return None
            if minimum is not None and v < minimum:
                self.problems.append(f"{self.ctx}: {key!r} must be >= {minimum}, got {v}")
                return None
        return v

    def finish(self) -> None:
        for k in sorted(self.data):
            self.problems.append(f"{self.ctx}: unknown key {k!r}")


def _is_kind(v, kind) -> bool:
    if kind is float:
        return isinstance(v, (int, float)) and not isinstance(v, bool)
    if kind is int:
        return isinstance(v, int) and not isinstance(v, bool)
    if isinstance(kind, tuple):
        return any(_is_kind(v, k) for k in kind)
    return isinstance(v, kind)


def _parse_thrust(thrust_d, problems) -> ThrustModel | None:
    if thrust_d is None:
        return ThrustModel()
    r = _Reader(thrust_d, "thrust", problems)
    k_f = r.number("k_f", None, positive=True)
    amp_dead = r.number("amp_dead", None, minimum=0.0)
    amp_max = r.number("amp_max", None, positive=True)
    alpha = r.take("alpha", None, kind=list)
    gamma = r.take("gamma", None, kind=list)
    r.finish()

    kwargs = {}
    if k_f is not None:
        kwargs["slope"] = k_f
    if amp_dead is not None:
        kwargs["amp_dead"] = amp_dead
    if amp_max is not None:
        kwargs["amp_max"] = amp_max

    def _floats(name, xs):
        out = []
        for x in xs:
            if not _is_kind(x, float):
                problems.append(f"thrust: {name} entries must be numbers")
                return None
            out.append(float(x))
        if not out:
            problems.append(f"thrust: {name} must be non-empty")
            return None
        return tuple(out)

    if alpha is not None:
        alpha = _floats("alpha", alpha)
    if gamma is not None:
        gamma = _floats("gamma", gamma)
        if gamma and gamma[0] != 1.0:
            problems.append("thrust: leading gamma entry must be 1.0 (rank 1 is uncompensated)")
            gamma = None

    if alpha is not None:
        kwargs["loss"] = alpha
        if gamma is not None:
            kwargs["amp_ratio"] = gamma
        else:
            derived = [1.0]
            ok = True
            for k in range(1, len(alpha)):
                if alpha[k] <= 0:
                    ok = False
                    break
                derived.append(alpha[k - 1] / alpha[k])
            if ok:
                kwargs["amp_ratio"] = tuple(derived)
    elif gamma is not None:
        loss = [1.0]
        for g in gamma[1:]:
            if g <= 0:
                problems.append("thrust: gamma entries must be positive")
                return None
            loss.append(loss[-1] / g)
        kwargs["loss"] = tuple(loss)
        kwargs["amp_ratio"] = gamma

    try:
        return ThrustModel(**kwargs)
    except (ThrustModelError, ValueError) as exc:
        problems.append(f"thrust: {exc}")
        return None


def _parse_gains(gains_d, problems) -> Gains | None:
    if gains_d is None:
        return Gains()
    r = _Reader(gains_d, "gains", problems)
    kwargs = {}
    for key in ("kp_v", "kd_v", "kp_yaw", "kd_yaw"):
        v = r.number(key, None, minimum=0.0)
        if v is not None:
            kwargs[key] = v
    r.finish()
    try:
        return Gains(**kwargs)
    except ValueError as exc:
        problems.append(f"gains: {exc}")
        return None


def _parse_lattice(conf, base_dir, problems) -> Lattice | None:
    if conf is None:
        return None
    if isinstance(conf, str):
        path = Path(conf)
        if not path.is_absolute():
            path = (base_dir or Path.cwd()) / path
        try:
            with open(path, "r", encoding="utf-8") as fh:
                conf = json.load(fh)
        except OSError as exc:
            problems.append(f"configuration: cannot read {path}: {exc}")
            return None
        except json.JSONDecodeError as exc:
            problems.append(f"configuration: {path} is not valid JSON: {exc}")
            return None
    if not isinstance(conf, dict):
        problems.append("configuration: must be an object or a file path")
        return None
    try:
        return lattice_from_dict(conf)
    except LatticeError as exc:
        problems.append(f"configuration: {exc}")
        return None


def _parse_drag(drag_d, lat, problems):
    """Return (surge, yaw, sway) drag coefficients, or None on failure."""
    if drag_d is not None:
        r = _Reader(drag_d, "drag", problems)
        surge = r.number("surge_kg_per_m", None, positive=True)
        yaw = r.number("yaw_kgm2", None, positive=True)
        sway = r.number("sway_kg_per_m", None, positive=True)
        r.finish()
        if surge is None or yaw is None:
            problems.append("drag: explicit drag needs both surge_kg_per_m and yaw_kgm2")
            return None
        return surge, yaw, surge if sway is None else sway
    if lat is None:
        return None
    try:
        surge, yaw = drag_lookup(load_drag_table(), projection_widths(lat))
    except DragTableError as exc:
        problems.append(f"drag: {exc} (give explicit drag coefficients instead)")
        return None
    return surge, yaw, surge


def parse_scenario(raw: dict, base_dir=None) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError(["scenario must be a JSON object"])
    problems: list[str] = []
    r = _Reader(raw, "scenario", problems)

    conf = r.take("configuration", kind=(dict, str), required=True)
    mode = r.take("mode", kind=str, required=True)
    duration = r.number("duration_s", required=True, positive=True)
    period = r.number("cycle_period_s", PERIOD, positive=True)
    dt = r.number("dt_s", None, positive=True)
    gains_d = r.take("gains", None, kind=dict)
    thrust_d = r.take("thrust", None, kind=dict)
    targets_d = r.take("targets", None, kind=dict)
    initial_d = r.take("initial", None, kind=dict)
    drag_d = r.take("drag", None, kind=dict)
    limits_d = r.take("limits", None, kind=dict)
    spc = r.take("samples_per_cycle", 720, kind=int)
    certify = r.take("certify", True, kind=bool)
    ripple = r.take("thrust_ripple", False, kind=bool)
    seed = r.take("seed", 0, kind=int)
    notes = r.take("notes", "", kind=str)
    r.finish()

    if mode is not None and mode not in MODES:
        problems.append(f"scenario: mode must be one of {list(MODES)}, got {mode!r}")
    if spc is not None and spc < 720:
        problems.append(f"scenario: samples_per_cycle must be >= 720, got {spc}")

    if period is None:
        period = PERIOD
    if dt is None:
        dt = period / 100.0
    elif dt > period / 100.0 + 1e-12:
        problems.append(
            f"scenario: dt_s {dt} too coarse; must be <= cycle_period_s/100 = {period / 100.0}"
        )

    lat = _parse_lattice(conf, base_dir, problems)
    gains = _parse_gains(gains_d, problems)
    model = _parse_thrust(thrust_d, problems)

    # initial state
    init_kwargs = {}
    if initial_d is not None:
        ri = _Reader(initial_d, "initial", problems)
        for json_key, attr in (
            ("x_m", "x"),
            ("y_m", "y"),
            ("yaw_rad", "yaw"),
            ("v_surge_mps", "v_surge"),
            ("v_sway_mps", "v_sway"),
            ("yaw_rate_radps", "yaw_rate"),
        ):
            v = ri.number(json_key, None)
            if v is not None:
                init_kwargs[attr] = v
        ri.finish()
    initial = BodyState(**init_kwargs)

    # targets
    surge_speed = 0.0
    yaw_target = initial.yaw
    yaw_step_time = 0.0
    if targets_d is not None:
        rt = _Reader(targets_d, "targets", problems)
        v = rt.number("surge_speed_mps", None)
        if v is not None:
            surge_speed = v
        y = rt.number("yaw_rad", None)
        if y is not None:
            yaw_target = y
        st = rt.number("yaw_step_time_s", None, minimum=0.0)
        if st is not None:
            yaw_step_time = st
        rt.finish()
        if mode in ("velocity-only", "combined") and v is None:
            problems.append(f"targets: surge_speed_mps is required in {mode} mode")
        if mode in ("yaw-only", "combined") and y is None:
            problems.append(f"targets: yaw_rad is required in {mode} mode")
    elif mode in MODES:
        problems.append(f"scenario: targets are required in {mode} mode")
    targets = TargetSchedule(surge_speed, yaw_target, yaw_step_time, initial.yaw)

    # body parameters
    params = None
    drag = _parse_drag(drag_d, lat, problems)
    if lat is not None and drag is not None:
        mass, inertia = aggregate_inertia(lat)
        try:
            params = BodyParams(mass, inertia, drag[0], drag[1], drag[2])
        except ValueError as exc:
            problems.append(f"drag: {exc}")

    speed_cmd_max = SPEED_CMD_MAX
    if limits_d is not None:
        rl = _Reader(limits_d, "limits", problems)
        v = rl.number("speed_cmd_max_mps", None, positive=True)
        if v is not None:
            speed_cmd_max = v
        rl.finish()

    if problems:
        raise ScenarioError(problems)

    return Scenario(
        lattice=lat,
        mode=mode,
        duration=duration,
        period=period,
        dt=dt,
        gains=gains,
        model=model,
        params=params,
        targets=targets,
        initial=initial,
        speed_cmd_max=speed_cmd_max,
        samples_per_cycle=int(spc),
        certify=bool(certify),
        thrust_ripple=bool(ripple),
        seed=int(seed),
        notes=notes,
        raw=raw,
        sha256=scenario_sha256(raw),
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"{path}: not valid JSON: {exc}"]) from None
    return parse_scenario(raw, base_dir=path.parent)
