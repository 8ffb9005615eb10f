"""Cycle-synchronous outer control loops.

Both loops run once per oscillation cycle on the state observed at the
boundary.  The velocity loop outputs a commanded surge speed: feedforward
target plus an accumulated PD correction (rectangular integration,
backward-difference derivative, zero on the first cycle), clamped so the
command stays inside +/- speed_cmd_max.  The yaw loop outputs a commanded
angular acceleration from a PD on the wrapped heading error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .allocation import allocate_forces, required_wrench, to_waveform_commands, Wrench
from .hydro import BodyParams
from .lattice import Lattice, structural_matrix
from .waveform import TailCommand, ThrustModel

SPEED_CMD_MAX = 0.15  # m/s, commanded-speed clamp (anti-windup bound)

MODES = ("velocity-only", "yaw-only", "combined")


@dataclass(frozen=True)
class Gains:
    kp_v: float = 0.6  # 1/s
    kd_v: float = 0.1  # -
    kp_yaw: float = 1.0  # 1/s^2
    kd_yaw: float = 0.2  # 1/s

    def __post_init__(self):
        for name in ("kp_v", "kd_v", "kp_yaw", "kd_yaw"):
            g = getattr(self, name)
            if not (math.isfinite(g) and g >= 0):
                raise ValueError(f"gain {name} must be finite and >= 0, got {g}")


@dataclass
class ControllerState:
    v_corr: float = 0.0  # m/s, accumulated velocity correction
    prev_ev: float | None = None  # m/s
    prev_eyaw: float | None = None  # rad

    def reset(self) -> None:
        self.v_corr = 0.0
        self.prev_ev = None
        self.prev_eyaw = None


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    return math.pi - (math.pi - a) % (2.0 * math.pi)


def velocity_command(
    state: ControllerState,
    gains: Gains,
    v_des: float,
    v_obs: float,
    dt: float,
    v_limit: float = SPEED_CMD_MAX,
) -> float:
    """Commanded surge speed for the next cycle."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    e = v_des - v_obs
    de = 0.0 if state.prev_ev is None else (e - state.prev_ev) / dt
    state.v_corr += (gains.kp_v * e + gains.kd_v * de) * dt
    v_cmd = v_des + state.v_corr
    if abs(v_cmd) > v_limit:
        v_cmd = math.copysign(v_limit, v_cmd)
        state.v_corr = v_cmd - v_des  # back-calculate so the clamp does not wind up
    state.prev_ev = e
    return v_cmd


def yaw_acceleration(
    state: ControllerState, gains: Gains, yaw_des: float, yaw_obs: float, dt: float
) -> float:
    """Commanded angular acceleration for the next cycle."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    e = wrap_angle(yaw_des - yaw_obs)
    # wrap the difference too: crossing the +/-pi seam is a small physical change
    de = 0.0 if state.prev_eyaw is None else wrap_angle(e - state.prev_eyaw) / dt
    state.prev_eyaw = e
    return gains.kp_yaw * e + gains.kd_yaw * de


@dataclass(frozen=True)
class CycleDecision:
    """Everything the controller decided at one cycle boundary."""

    commands: tuple[TailCommand, ...]
    forces: np.ndarray  # N, per module, what the allocator asked for
    wrench: Wrench
    v_cmd: float  # m/s (0 in yaw-only)
    yaw_accel: float  # rad/s^2 (0 in velocity-only)


def cycle_update(
    lat: Lattice,
    state: ControllerState,
    gains: Gains,
    targets,
    observed,
    mode: str,
    model: ThrustModel,
    params: BodyParams,
    omega: float,
    dt: float,
    v_limit: float = SPEED_CMD_MAX,
) -> CycleDecision:
    """One outer-loop step: errors -> wrench -> forces -> tail commands.

    ``targets`` needs .surge_speed and/or .yaw depending on mode;
    ``observed`` needs .v_surge, .yaw, .yaw_rate.  Deactivated loops zero
    their wrench contribution entirely: velocity-only drops both the
    commanded acceleration and the rotational drag compensation; yaw-only
    commands zero speed so the surge term vanishes.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")

    if mode == "yaw-only":
        v_cmd = 0.0
    else:
        v_cmd = velocity_command(state, gains, targets.surge_speed, observed.v_surge, dt, v_limit)

    if mode == "velocity-only":
        accel = 0.0
        wrench = Wrench(params.surge_drag * abs(v_cmd) * v_cmd, 0.0)
    else:
        accel = yaw_acceleration(state, gains, targets.yaw, observed.yaw, dt)
        wrench = required_wrench(v_cmd, observed.yaw_rate, accel, params)

    forces = allocate_forces(structural_matrix(lat), wrench)
    commands = to_waveform_commands(forces, lat.rear_ranks, model, omega)
    return CycleDecision(tuple(commands), forces, wrench, v_cmd, accel)
