"""Per-cycle tail waveform and the amplitude <-> cycle-averaged thrust map.

One module's tail follows phi(t) = phi0 + A*cos(w*t)*cos(phi0) with the
centerline phi0 restricted to {0, pi}: 0 pushes forward, pi reverses, and
the cos(phi0) factor flips the amplitude sign so the 0 <-> pi transition
jump stays small.  Averaged over a cycle the thrust magnitude is linear in
amplitude above a dead zone, scaled by a per-rank wake loss factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

AMP_DEAD = 0.75  # rad, below this the flippers never open fully -> no net thrust
AMP_MAX = 2.5  # rad, above this reverse-thrust fraction and dock shake get severe
THRUST_SLOPE = 0.04  # N/rad, nominal; calibration range 0.02..0.08 (see README)
PERIOD = 1.5  # s, default oscillation period
OMEGA = 2.0 * math.pi / PERIOD  # rad/s

# Wake thrust-loss factors by rearward rank (leader first) and the matching
# amplitude-ratio table used for safety checks.  Measured only to rank 3;
# deeper ranks reuse the last entry (no further loss modeled).
RANK_LOSS = (1.0, 0.72, 0.67)
RANK_AMP_RATIO = (1.0, 1.49, 1.07)


class ThrustModelError(ValueError):
    pass


@dataclass(frozen=True)
class TailCommand:
    centerline: float  # rad, 0.0 or math.pi
    amplitude: float  # rad, >= 0
    omega: float = OMEGA  # rad/s, shared across a configuration
    saturated: bool = False  # True when the demanded amplitude was clipped

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class ThrustModel:
    slope: float = THRUST_SLOPE  # N/rad
    amp_dead: float = AMP_DEAD  # rad
    amp_max: float = AMP_MAX  # rad
    loss: tuple[float, ...] = RANK_LOSS  # thrust retained at rank k (1-indexed)
    amp_ratio: tuple[float, ...] = RANK_AMP_RATIO  # rear/front amplitude ratio at rank k

    def __post_init__(self):
        if not self.slope > 0:
            raise ThrustModelError(f"thrust slope must be positive, got {self.slope}")
        if not (0 <= self.amp_dead < self.amp_max):
            raise ThrustModelError(
                f"need 0 <= dead zone < max amplitude, got {self.amp_dead}, {self.amp_max}"
            )
        if not self.loss or self.loss[0] != 1.0:
            raise ThrustModelError("rank-1 loss factor must be exactly 1")
        if any(b > a + 1e-12 for a, b in zip(self.loss, self.loss[1:])):
            raise ThrustModelError("loss factors must be non-increasing with rank")
        if any(x <= 0 for x in self.loss):
            raise ThrustModelError("loss factors must be positive")
        if not self.amp_ratio or any(x <= 0 for x in self.amp_ratio):
            raise ThrustModelError("amplitude ratios must be positive")

    def loss_at(self, rank: int) -> float:
        if rank < 1:
            raise ThrustModelError(f"rank must be >= 1, got {rank}")
        return self.loss[min(rank, len(self.loss)) - 1]

    def amp_ratio_at(self, rank: int) -> float:
        if rank < 1:
            raise ThrustModelError(f"rank must be >= 1, got {rank}")
        if rank > len(self.amp_ratio):
            return 1.0  # loss is flat past the table, so no extra compensation
        return self.amp_ratio[rank - 1]


def tail_angle(cmd: TailCommand, t):
    """Tail angle at time t (scalar or array), in radians."""
    return cmd.centerline + cmd.amplitude * np.cos(cmd.omega * t) * math.cos(cmd.centerline)


def cycle_avg_thrust(model: ThrustModel, cmd: TailCommand, rank: int = 1) -> float:
    """Signed cycle-averaged thrust along the module's +y axis, in newtons."""
    sign = 1.0 if cmd.centerline == 0.0 else -1.0
    magnitude = model.loss_at(rank) * model.slope * max(0.0, cmd.amplitude - model.amp_dead)
    return sign * magnitude


def invert_thrust(model: ThrustModel, f_mag: float, rank: int = 1) -> tuple[float, bool]:
    """Amplitude that yields |thrust| = f_mag at the given rank.

    Returns (amplitude, saturated).  The amplitude is clipped to amp_max and
    the flag reports whether clipping happened.  f_mag = 0 maps to the dead
    zone boundary; callers that want an idle tail must special-case it.
    """
    if f_mag < 0:
        raise ValueError(f"thrust magnitude must be >= 0, got {f_mag}")
    amp = model.amp_dead + f_mag / (model.loss_at(rank) * model.slope)
    if amp > model.amp_max:
        return model.amp_max, True
    return amp, False
