import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from raftsim.control import (
    MODES,
    SPEED_CMD_MAX,
    ControllerState,
    Gains,
    cycle_update,
    velocity_command,
    wrap_angle,
    yaw_acceleration,
)
from raftsim.hydro import BodyParams
from raftsim.lattice import build_lattice
from raftsim.scenario import TargetSample
from raftsim.sim import BodyState
from raftsim.waveform import OMEGA, ThrustModel

# ---------------------------------------------------------------------------
# angle wrapping


def test_wrap_angle_values():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)  # half-open on the left
    assert wrap_angle(2 * math.pi) == pytest.approx(0.0)


@given(st.floats(-50.0, 50.0), st.integers(-3, 3))
def test_wrap_angle_properties(a, k):
    w = wrap_angle(a)
    assert -math.pi < w <= math.pi + 1e-15
    assert wrap_angle(a + 2 * math.pi * k) == pytest.approx(w, abs=1e-9)


# ---------------------------------------------------------------------------
# velocity loop


def test_velocity_command_first_cycle_worked_example():
    # fresh state: no derivative contribution, one rectangle of the
    # proportional term accumulates
    st_ = ControllerState()
    v = velocity_command(st_, Gains(kp_v=0.6, kd_v=0.0), 0.06, 0.04, 1.5)
    assert v == pytest.approx(0.06 + 0.6 * 0.02 * 1.5)
    assert v == pytest.approx(0.078)


def test_velocity_command_derivative_kicks_in_second_cycle():
    g = Gains(kp_v=0.6, kd_v=0.1)
    st_ = ControllerState()
    velocity_command(st_, g, 0.06, 0.0, 1.5)     # e = 0.06
    corr_before = st_.v_corr
    v2 = velocity_command(st_, g, 0.06, 0.03, 1.5)  # e = 0.03, de = -0.02/s
    expect_step = (0.6 * 0.03 + 0.1 * (0.03 - 0.06) / 1.5) * 1.5
    assert v2 == pytest.approx(0.06 + corr_before + expect_step)


def test_velocity_command_clamp_and_antiwindup():
    st_ = ControllerState()
    g = Gains(kp_v=10.0, kd_v=0.0)
    v = velocity_command(st_, g, 0.1, -5.0, 1.5)
    assert v == SPEED_CMD_MAX
    # the accumulated correction was back-calculated to sit exactly at the
    # clamp, so one small opposite error immediately unsticks the command
    assert st_.v_corr == pytest.approx(SPEED_CMD_MAX - 0.1)
    v2 = velocity_command(st_, g, 0.1, 0.2, 1.5)
    assert v2 < SPEED_CMD_MAX


def test_velocity_command_custom_limit_and_bad_dt():
    st_ = ControllerState()
    v = velocity_command(st_, Gains(kp_v=10.0, kd_v=0.0), 0.3, -5.0, 1.5, v_limit=0.25)
    assert v == 0.25
    with pytest.raises(ValueError):
        velocity_command(st_, Gains(), 0.1, 0.0, 0.0)


# ---------------------------------------------------------------------------
# yaw loop


def test_yaw_acceleration_first_and_second_cycle():
    g = Gains(kp_yaw=1.0, kd_yaw=0.2)
    st_ = ControllerState()
    a1 = yaw_acceleration(st_, g, math.pi / 2, 0.0, 1.5)
    assert a1 == pytest.approx(math.pi / 2)
    a2 = yaw_acceleration(st_, g, math.pi / 2, 0.3, 1.5)
    e2 = math.pi / 2 - 0.3
    assert a2 == pytest.approx(1.0 * e2 + 0.2 * (e2 - math.pi / 2) / 1.5)


def test_yaw_error_wraps_across_seam():
    g = Gains(kp_yaw=1.0, kd_yaw=0.0)
    st_ = ControllerState()
    # target just past +pi, observed just short of -pi: tiny physical error
    a = yaw_acceleration(st_, g, math.pi - 0.05, -math.pi + 0.05, 1.5)
    assert abs(a) == pytest.approx(0.1, abs=1e-12)


def test_yaw_derivative_wraps_too():
    # target sits exactly on the seam; the heading drifts across it between
    # cycles, so the raw errors jump from ~-pi to ~+pi while the physical
    # change is tiny
    g = Gains(kp_yaw=0.0, kd_yaw=1.0)
    st_ = ControllerState()
    yaw_acceleration(st_, g, math.pi, -0.01, 1.0)  # e = -(pi - 0.01)
    a = yaw_acceleration(st_, g, math.pi, +0.01, 1.0)  # e = +(pi - 0.01)
    # de is the wrapped difference (-0.02), not a ~2pi jump
    assert a == pytest.approx(-0.02, abs=1e-9)


@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_yaw_acceleration_bounded(target, obs):
    g = Gains()
    st_ = ControllerState()
    a = yaw_acceleration(st_, g, target, obs, 1.5)
    assert abs(a) <= g.kp_yaw * math.pi + 1e-9


# ---------------------------------------------------------------------------
# one full cycle decision


def _setup():
    lat = build_lattice([(0, 0), (1, 0), (2, 0)])
    params = BodyParams(1.98, 0.0368, 7.0, 0.032, 7.0)
    return lat, ThrustModel(), params


def test_cycle_update_velocity_only_zeroes_torque():
    lat, model, params = _setup()
    d = cycle_update(
        lat, ControllerState(), Gains(), TargetSample(0.06, 0.0),
        BodyState(yaw_rate=0.7), "velocity-only", model, params, OMEGA, 1.5,
    )
    assert d.yaw_accel == 0.0
    assert d.wrench.yaw_torque == 0.0  # rotational drag makeup is off too
    assert d.wrench.surge_force > 0
    assert len(d.commands) == lat.n
    assert sum(d.forces) == pytest.approx(d.wrench.surge_force)


def test_cycle_update_yaw_only_zeroes_surge():
    lat, model, params = _setup()
    d = cycle_update(
        lat, ControllerState(), Gains(), TargetSample(0.0, 1.0),
        BodyState(), "yaw-only", model, params, OMEGA, 1.5,
    )
    assert d.v_cmd == 0.0
    assert d.wrench.surge_force == 0.0
    assert d.wrench.yaw_torque != 0.0
    assert sum(d.forces) == pytest.approx(0.0, abs=1e-15)


def test_cycle_update_combined_and_bad_mode():
    lat, model, params = _setup()
    d = cycle_update(
        lat, ControllerState(), Gains(), TargetSample(0.05, 0.5),
        BodyState(), "combined", model, params, OMEGA, 1.5,
    )
    assert d.v_cmd > 0.05 and d.yaw_accel > 0
    with pytest.raises(ValueError):
        cycle_update(lat, ControllerState(), Gains(), TargetSample(0, 0),
                     BodyState(), "sideways", model, params, OMEGA, 1.5)
    assert MODES == ("velocity-only", "yaw-only", "combined")


def test_gains_validation():
    with pytest.raises(ValueError):
        Gains(kp_v=-0.1)
    with pytest.raises(ValueError):
        Gains(kd_yaw=math.nan)
