"""Wrench computation and minimum-norm force distribution.

The structural matrix P (ones over x-offsets) maps per-module forces to the
net surge force and yaw torque.  Its pseudo-inverse has a closed form
through the 2x2 Gram matrix P P^T = [[N, Sx], [Sx, Sxx]]: solve that tiny
system for (u, v) and the minimum-norm forces are f_i = u + v * x_i — an
affine profile in the offset, which also makes equal-offset modules get
bitwise-identical forces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hydro import BodyParams
from .waveform import TailCommand, ThrustModel, invert_thrust


class AllocationError(ValueError):
    pass


@dataclass(frozen=True)
class Wrench:
    surge_force: float  # N, along body +y
    yaw_torque: float  # N m

    def __post_init__(self):
        if not (math.isfinite(self.surge_force) and math.isfinite(self.yaw_torque)):
            raise AllocationError("wrench components must be finite")


def required_wrench(
    v_cmd: float, yaw_rate: float, yaw_accel: float, params: BodyParams
) -> Wrench:
    """Steady-surge wrench: drag at the commanded speed, torque for the
    commanded angular acceleration plus rotational drag compensation."""
    surge = params.surge_drag * abs(v_cmd) * v_cmd
    torque = params.inertia * yaw_accel + params.yaw_drag * abs(yaw_rate) * yaw_rate
    return Wrench(surge, torque)


def allocate_forces(P: np.ndarray, wrench: Wrench) -> np.ndarray:
    """Minimum-norm per-module forces f with P @ f = wrench.

    Solves the 2x2 Gram system in closed form.  Raises AllocationError when
    all offsets coincide (rank-1 P: the Gram determinant vanishes and no
    finite torque authority exists).
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != 2:
        raise AllocationError(f"structural matrix must be 2xN, got {P.shape}")
    x = P[1]
    n = float(P.shape[1])
    sx = float(x.sum())
    sxx = float(x @ x)
    det = n * sxx - sx * sx
    scale = n * sxx + sx * sx
    if det <= 1e-12 * max(scale, 1e-300):
        raise AllocationError("rank-deficient structural matrix (single column?)")
    w0, w1 = wrench.surge_force, wrench.yaw_torque
    u = (sxx * w0 - sx * w1) / det
    v = (n * w1 - sx * w0) / det
    return u + v * x


def to_waveform_commands(
    forces, ranks, model: ThrustModel, omega: float
) -> list[TailCommand]:
    """Per-module tail commands realizing the given cycle-averaged forces.

    Negative force flips the centerline to pi; the amplitude inverts the
    rank-compensated thrust map and is clipped to the model's maximum with
    the saturation flag set.  An exactly-zero force yields an idle tail
    (A = 0, centerline 0) rather than a dead-zone-boundary amplitude.
    """
    cmds = []
    for f, k in zip(forces, ranks):
        f = float(f)
        if f == 0.0:
            cmds.append(TailCommand(0.0, 0.0, omega))
            continue
        centerline = 0.0 if f > 0 else math.pi
        amp, saturated = invert_thrust(model, abs(f), int(k))
        cmds.append(TailCommand(centerline, amp, omega, saturated))
    return cmds
