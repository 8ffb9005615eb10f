"""Closed-loop simulation: cycle-synchronous control wrapped around an RK4
rigid-body integrator with quadratic drag.

Frame conventions: the body surge axis is +y (tails at angle 0 point along
-y and push the raft toward +y), sway is the body x axis, heading is the
angle of the body frame in the world (heading 0 faces world +y).  The
6-state is (x, y, yaw, v_surge, v_sway, yaw_rate) with yaw kept in
(-pi, pi].

The controller acts once per tail cycle: it reads the state at the cycle
boundary, picks per-module tail commands, and those commands (hence the
cycle-averaged module forces) are held constant while the rigid body is
integrated through the cycle in substeps.  Sway is never actuated; it only
decays under its own drag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .collision import DEFAULT_TAIL, Certificate, TailShape, certify_no_undock
from .control import ControllerState, Gains, cycle_update, wrap_angle
from .hydro import BodyParams
from .lattice import Lattice, rear_ranks
from .waveform import ThrustModel, cycle_avg_thrust


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class BodyState:
    x: float = 0.0  # m, world
    y: float = 0.0  # m, world
    yaw: float = 0.0  # rad, (-pi, pi]
    v_surge: float = 0.0  # m/s, body +y
    v_sway: float = 0.0  # m/s, body x
    yaw_rate: float = 0.0  # rad/s


def _deriv(s, f_sum, torque, m, inertia, c_surge, c_yaw, c_sway):
    x, y, yaw, vu, vv, om = s
    sy = math.sin(yaw)
    cy = math.cos(yaw)
    return (
        vv * cy - vu * sy,
        vv * sy + vu * cy,
        om,
        (f_sum - c_surge * abs(vu) * vu) / m,
        -(c_sway / m) * abs(vv) * vv,
        (torque - c_yaw * abs(om) * om) / inertia,
    )


def _rk4(s, f_sum, torque, m, inertia, c_surge, c_yaw, c_sway, dt):
    k1 = _deriv(s, f_sum, torque, m, inertia, c_surge, c_yaw, c_sway)
    s2 = tuple(a + 0.5 * dt * b for a, b in zip(s, k1))
    k2 = _deriv(s2, f_sum, torque, m, inertia, c_surge, c_yaw, c_sway)
    s3 = tuple(a + 0.5 * dt * b for a, b in zip(s, k2))
    k3 = _deriv(s3, f_sum, torque, m, inertia, c_surge, c_yaw, c_sway)
    s4 = tuple(a + dt * b for a, b in zip(s, k3))
    k4 = _deriv(s4, f_sum, torque, m, inertia, c_surge, c_yaw, c_sway)
    return tuple(
        a + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(s, k1, k2, k3, k4)
    )


def _rk4_ripple(s, t0, f_sum, torque, omega, m, inertia, c_surge, c_yaw, c_sway, dt):
    """RK4 step with the actuation modulated by 1 - cos(2 omega t).

    The modulation averages to exactly 1 over a cycle, so the cycle-mean
    thrust is unchanged; flapping produces force at twice the tail
    frequency, hence the 2 omega.  Qualitative-studies flag only.
    """

    def d(si, ti):
        g = 1.0 - math.cos(2.0 * omega * ti)
        return _deriv(si, f_sum * g, torque * g, m, inertia, c_surge, c_yaw, c_sway)

    k1 = d(s, t0)
    s2 = tuple(a + 0.5 * dt * b for a, b in zip(s, k1))
    k2 = d(s2, t0 + 0.5 * dt)
    s3 = tuple(a + 0.5 * dt * b for a, b in zip(s, k2))
    k3 = d(s3, t0 + 0.5 * dt)
    s4 = tuple(a + dt * b for a, b in zip(s, k3))
    k4 = d(s4, t0 + dt)
    return tuple(
        a + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(s, k1, k2, k3, k4)
    )


def dynamics_step(
    state: BodyState, forces, x_offsets, params: BodyParams, dt: float
) -> BodyState:
    """One RK4 step under fixed per-module forces (N, along body +y)."""
    if dt <= 0:
        raise SimulationError(f"dt must be positive, got {dt}")
    forces = np.asarray(forces, dtype=float)
    x_offsets = np.asarray(x_offsets, dtype=float)
    f_sum = float(forces.sum())
    torque = float(forces @ x_offsets)
    s = (state.x, state.y, state.yaw, state.v_surge, state.v_sway, state.yaw_rate)
    s = _rk4(
        s, f_sum, torque,
        params.mass, params.inertia,
        params.surge_drag, params.yaw_drag, params.sway_drag,
        dt,
    )
    return BodyState(s[0], s[1], wrap_angle(s[2]), s[3], s[4], s[5])


SERIES_COLUMNS = (
    "t_s",
    "x_m",
    "y_m",
    "yaw_rad",
    "v_surge_mps",
    "v_sway_mps",
    "yaw_rate_radps",
    "surge_target_mps",
    "yaw_target_rad",
    "v_cmd_mps",
    "yaw_accel_cmd_radps2",
    "thrust_sum_N",
    "torque_sum_Nm",
)


@dataclass
class RunResult:
    series: dict  # column name -> np.ndarray; empty dict when not recorded
    cycles: int
    period: float  # s
    dt: float  # s, effective substep
    final_state: BodyState
    cycle_start_times: list
    cycle_commands: list  # per cycle: tuple of TailCommand
    cycle_forces_requested: list  # per cycle: np.ndarray, allocator output
    cycle_forces: list  # per cycle: np.ndarray, realized cycle-average thrust
    cycle_v_cmd: list
    cycle_yaw_accel: list
    certificates: list  # per cycle: Certificate, or empty when certification off
    saturation_events: int

    @property
    def certificate_failures(self) -> int:
        return sum(1 for c in self.certificates if not c.ok)

    @property
    def collisions(self) -> int:
        return sum(1 for c in self.certificates if c.collision)

    @property
    def min_clearance(self) -> float:
        if not self.certificates:
            return math.inf
        return min(c.min_clearance for c in self.certificates)

    @property
    def time(self) -> np.ndarray:
        return self.series["t_s"]


def run_scenario(scn, record_series: bool = True) -> RunResult:
    """Run a closed-loop scenario to completion.

    `scn` carries the lattice, gains, thrust model, body parameters, mode,
    targets and timing (see scenario.py).  The run covers whole cycles:
    ceil(duration / period) of them.  Unless certification is disabled on
    the scenario, every cycle's commands are certified and the certificates
    collected; a failed certificate does not stop the run.
    """
    lat: Lattice = scn.lattice
    gains: Gains = scn.gains
    model: ThrustModel = scn.model
    params: BodyParams = scn.params
    period = float(scn.period)
    if period <= 0:
        raise SimulationError("cycle period must be positive")
    if scn.dt > period / 100.0 + 1e-12:
        raise SimulationError(
            f"dt {scn.dt} too coarse: must be <= period/100 = {period / 100.0}"
        )
    nsub = max(1, math.ceil(period / scn.dt - 1e-9))
    dt = period / nsub
    cycles = max(1, math.ceil(float(scn.duration) / period - 1e-9))
    omega = 2.0 * math.pi / period
    ranks = rear_ranks(lat)
    x_off = lat.x_off
    shape: TailShape = getattr(scn, "tail_shape", DEFAULT_TAIL)
    certify = bool(getattr(scn, "certify", True))
    samples_per_cycle = int(getattr(scn, "samples_per_cycle", 720))
    ripple = bool(getattr(scn, "thrust_ripple", False))

    state: BodyState = scn.initial
    ctrl = ControllerState()

    n_rows = 1 + cycles * nsub if record_series else 0
    cols = {name: np.empty(n_rows) for name in SERIES_COLUMNS} if record_series else {}
    row = 0

    def record(t, st, tgt, v_cmd, accel, f_sum, torque):
        nonlocal row
        cols["t_s"][row] = t
        cols["x_m"][row] = st.x
        cols["y_m"][row] = st.y
        cols["yaw_rad"][row] = st.yaw
        cols["v_surge_mps"][row] = st.v_surge
        cols["v_sway_mps"][row] = st.v_sway
        cols["yaw_rate_radps"][row] = st.yaw_rate
        cols["surge_target_mps"][row] = tgt.surge_speed
        cols["yaw_target_rad"][row] = tgt.yaw
        cols["v_cmd_mps"][row] = v_cmd
        cols["yaw_accel_cmd_radps2"][row] = accel
        cols["thrust_sum_N"][row] = f_sum
        cols["torque_sum_Nm"][row] = torque
        row += 1

    result = RunResult(
        series=cols,
        cycles=cycles,
        period=period,
        dt=dt,
        final_state=state,
        cycle_start_times=[],
        cycle_commands=[],
        cycle_forces_requested=[],
        cycle_forces=[],
        cycle_v_cmd=[],
        cycle_yaw_accel=[],
        certificates=[],
        saturation_events=0,
    )

    for c in range(cycles):
        t0 = c * period
        tgt = scn.targets_at(t0)
        decision = cycle_update(
            lat, ctrl, gains, tgt, state, scn.mode, model, params, omega, period,
            v_limit=scn.speed_cmd_max,
        )
        realized = np.array(
            [
                cycle_avg_thrust(model, cmd, rank)
                for cmd, rank in zip(decision.commands, ranks)
            ]
        )
        f_sum = float(realized.sum())
        torque = float(realized @ x_off)

        result.cycle_start_times.append(t0)
        result.cycle_commands.append(decision.commands)
        result.cycle_forces_requested.append(decision.forces)
        result.cycle_forces.append(realized)
        result.cycle_v_cmd.append(decision.v_cmd)
        result.cycle_yaw_accel.append(decision.yaw_accel)
        result.saturation_events += sum(1 for cmd in decision.commands if cmd.saturated)
        if certify:
            result.certificates.append(
                certify_no_undock(
                    lat, decision.commands, shape, samples_per_cycle,
                    declared_gamma=model.amp_ratio,
                )
            )

        if record_series and c == 0:
            record(0.0, state, tgt, decision.v_cmd, decision.yaw_accel, f_sum, torque)

        s = (state.x, state.y, state.yaw, state.v_surge, state.v_sway, state.yaw_rate)
        for k in range(nsub):
            if ripple:
                s = _rk4_ripple(
                    s, t0 + k * dt, f_sum, torque, omega,
                    params.mass, params.inertia,
                    params.surge_drag, params.yaw_drag, params.sway_drag,
                    dt,
                )
            else:
                s = _rk4(
                    s, f_sum, torque,
                    params.mass, params.inertia,
                    params.surge_drag, params.yaw_drag, params.sway_drag,
                    dt,
                )
            if record_series:
                st = BodyState(s[0], s[1], wrap_angle(s[2]), s[3], s[4], s[5])
                record(t0 + (k + 1) * dt, st, tgt, decision.v_cmd, decision.yaw_accel,
                       f_sum, torque)
        state = BodyState(s[0], s[1], wrap_angle(s[2]), s[3], s[4], s[5])

    result.final_state = state
    return result


# ---------------------------------------------------------------------------
# step-response metrics

def progress_metrics(time, progress, *, settle_level: float = 0.9) -> dict:
    """Crossing-based metrics on a normalized step response.

    `progress` should run from ~0 toward 1 as the step completes.  Rise
    time is the gap between the first (interpolated) crossings of 0.3 and
    0.9; if 0.9 is never reached the response did not settle and rise time
    is None.  RMS error is taken from the first settle crossing onward, in
    progress units (callers rescale by the step size).
    """
    time = np.asarray(time, dtype=float)
    progress = np.asarray(progress, dtype=float)
    if time.shape != progress.shape or time.ndim != 1 or time.size < 2:
        raise SimulationError("need matching 1-D time/progress series with >= 2 samples")

    def first_crossing(level):
        above = progress >= level
        if not above.any():
            return None
        k = int(np.argmax(above))
        if k == 0:
            return float(time[0])
        t0, t1 = time[k - 1], time[k]
        p0, p1 = progress[k - 1], progress[k]
        if p1 == p0:
            return float(t1)
        return float(t0 + (level - p0) / (p1 - p0) * (t1 - t0))

    t30 = first_crossing(0.3)
    t90 = first_crossing(settle_level)
    settled = t90 is not None
    out = {
        "t30_s": t30,
        "t90_s": t90,
        "rise_time_s": (t90 - t30) if (settled and t30 is not None) else None,
        "settled": settled,
        "window_start_s": t90,
        "rms_error_after_settle": None,
        "final_error": float(1.0 - progress[-1]),
    }
    if settled:
        w = time >= t90
        out["rms_error_after_settle"] = float(
            math.sqrt(np.mean((1.0 - progress[w]) ** 2))
        )
    return out


def speed_step_metrics(time, v_surge, v_initial: float, v_target: float) -> dict:
    """Step metrics for a surge-speed step, reported in m/s."""
    step = v_target - v_initial
    if step == 0:
        raise SimulationError("speed step is zero; no step response to measure")
    progress = (np.asarray(v_surge, dtype=float) - v_initial) / step
    out = progress_metrics(time, progress)
    return _rescale(out, abs(step))


def yaw_step_metrics(time, yaw, yaw_target: float) -> dict:
    """Step metrics for a heading step, reported in rad.

    Progress is 1 - e(t)/e(0) with both errors wrapped, so the wrap seam
    never shows up as a fake jump in the response.
    """
    yaw = np.asarray(yaw, dtype=float)
    err = np.array([wrap_angle(yaw_target - a) for a in yaw])
    e0 = float(err[0])
    if abs(e0) < 1e-12:
        raise SimulationError("initial heading error is zero; no step response to measure")
    progress = 1.0 - err / e0
    out = progress_metrics(time, progress)
    return _rescale(out, abs(e0))


def _rescale(metrics: dict, step_mag: float) -> dict:
    for key in ("rms_error_after_settle", "final_error"):
        if metrics[key] is not None:
            metrics[key] = metrics[key] * step_mag
    return metrics
