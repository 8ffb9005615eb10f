"""Drag lookup by silhouette width, wake-loss factors, and decay fits.

The drag table holds measured coefficients for single-row (parallel)
assemblies of 1..5 modules.  Arbitrary shapes reuse those entries through
their axis projections: surge drag by the number of distinct columns, yaw
drag by the larger of column/row counts.  No extrapolation — widths outside
the table raise.

The decay fit recovers a quadratic drag coefficient from a coast-down
series.  With v' = -(C/m) v|v| and v0 > 0 the speed follows
v(t) = 1 / (1/v0 + (C/m) t), so fitting (u, c) in v = 1/(u + c t) by
Gauss-Newton (seeded by a linear fit on 1/v) gives C = c * m.  The same
math serves angular coast-downs with (omega, I).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np


class DragTableError(ValueError):
    pass


class DragFitError(ValueError):
    pass


@dataclass(frozen=True)
class BodyParams:
    """Aggregate rigid-body constants used by allocation and simulation."""

    mass: float  # kg
    inertia: float  # kg m^2, yaw, about COM
    surge_drag: float  # kg/m, quadratic, body +y
    yaw_drag: float  # kg m^2, quadratic
    sway_drag: float  # kg/m, quadratic, body x; defaults to surge_drag upstream

    def __post_init__(self):
        for name in ("mass", "inertia", "surge_drag", "yaw_drag", "sway_drag"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class DragTable:
    counts: tuple[int, ...]
    mass: tuple[float, ...]  # kg
    inertia: tuple[float, ...]  # kg m^2 (converted from g m^2 at load)
    surge_drag: tuple[float, ...]  # kg/m
    yaw_drag: tuple[float, ...]  # kg m^2

    def __post_init__(self):
        n = len(self.counts)
        if not all(len(t) == n for t in (self.mass, self.inertia, self.surge_drag, self.yaw_drag)):
            raise DragTableError("drag table rows have mismatched lengths")
        if any(x <= 0 for row in (self.mass, self.inertia, self.surge_drag, self.yaw_drag) for x in row):
            raise DragTableError("drag table entries must be positive")
        if any(b < a for a, b in zip(self.surge_drag, self.surge_drag[1:])):
            raise DragTableError("surge drag must be non-decreasing with width")
        if any(b < a for a, b in zip(self.yaw_drag, self.yaw_drag[1:])):
            raise DragTableError("yaw drag must be non-decreasing with width")


def load_drag_table(path=None) -> DragTable:
    """Load a drag table; the bundled measured defaults when path is None."""
    if path is None:
        raw = json.loads(
            resources.files("raftsim").joinpath("data/drag_table.json").read_text()
        )
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    return DragTable(
        counts=tuple(int(c) for c in raw["counts"]),
        mass=tuple(float(x) for x in raw["mass_kg"]),
        inertia=tuple(float(x) * 1e-3 for x in raw["inertia_gm2"]),
        surge_drag=tuple(float(x) for x in raw["surge_drag_kg_per_m"]),
        yaw_drag=tuple(float(x) * 1e-3 for x in raw["yaw_drag_gm2"]),
    )


def drag_lookup(table: DragTable, widths: tuple[int, int]) -> tuple[float, float]:
    """(surge, yaw) drag for (x_width, max_width), both in SI.

    Surge drag is indexed by the lateral module count, yaw drag by the
    larger silhouette.  Widths outside the table raise DragTableError.
    """
    x_width, max_width = widths
    try:
        i = table.counts.index(int(x_width))
        j = table.counts.index(int(max_width))
    except ValueError:
        raise DragTableError(
            f"widths {widths} outside drag table range {table.counts[0]}..{table.counts[-1]}"
        ) from None
    return table.surge_drag[i], table.yaw_drag[j]


def alpha_from_slopes(slopes) -> tuple[float, ...]:
    """Per-rank thrust-retention factors from shared-intercept line slopes.

    ``slopes[0]`` is the free-baseline slope m0; ``slopes[k]`` for k >= 1 is
    the total-thrust slope of a column with k actuated modules.  The k-th
    module's marginal share is (m_k - m_{k-1})/m0, with the k = 1 difference
    taken against the zero-actuation baseline (so alpha(1) = m1/m0).
    """
    m = [float(x) for x in slopes]
    if len(m) < 2:
        raise DragFitError("need the baseline slope and at least one column slope")
    if m[0] <= 0:
        raise DragFitError(f"baseline slope must be positive, got {m[0]}")
    prev = 0.0
    alphas = []
    for k, mk in enumerate(m[1:], start=1):
        a = (mk - prev) / m[0]
        if a <= 0:
            raise DragFitError(
                f"rank {k} marginal slope is not positive (total wake shadowing)"
            )
        alphas.append(a)
        prev = mk
    return tuple(alphas)


def gamma_from_alpha(alphas) -> tuple[float, ...]:
    """Amplitude compensation ratios: gamma(1) = 1, gamma(k) = a(k-1)/a(k)."""
    a = [float(x) for x in alphas]
    if any(x <= 0 for x in a):
        raise DragFitError("loss factors must be positive")
    return (1.0,) + tuple(a[k - 1] / a[k] for k in range(1, len(a)))


def fit_drag_from_decay(times, speeds, mass: float, *, max_iter: int = 60) -> float:
    """Quadratic drag coefficient from a coast-down (t, v) series.

    ``mass`` scales the fitted rate into a coefficient: pass the body mass
    with surge speeds (returns kg/m) or the yaw inertia with angular rates
    (returns kg m^2).
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(speeds, dtype=float)
    if t.shape != v.shape or t.ndim != 1:
        raise DragFitError("times and speeds must be 1-D and the same length")
    if t.size < 10:
        raise DragFitError(f"need at least 10 samples, got {t.size}")
    if mass <= 0:
        raise DragFitError(f"mass/inertia must be positive, got {mass}")
    if np.any(v <= 0):
        raise DragFitError("speeds must stay positive (flip signs upstream)")
    if np.any(np.diff(t) <= 0):
        raise DragFitError("times must be strictly increasing")
    if v[-1] >= v[0]:
        raise DragFitError("series does not decay — no drag information")
    # tolerate noise-level wiggle, reject grossly non-monotone data
    if np.any(v[1:] > v[:-1] * 1.5):
        raise DragFitError("series is non-monotone beyond noise levels")

    # v = 1/(u + c t): linear regression on 1/v seeds (u, c), exact when noiseless.
    A = np.vstack([np.ones_like(t), t]).T
    u, c = np.linalg.lstsq(A, 1.0 / v, rcond=None)[0]
    if c <= 0:
        raise DragFitError("initial estimate has non-positive drag; data is not a decay")

    for _ in range(max_iter):
        vm = 1.0 / (u + c * t)
        r = vm - v
        # d v / d u = -vm^2, d v / d c = -t vm^2
        j = -np.vstack([vm**2, t * vm**2]).T
        step, *_ = np.linalg.lstsq(j, -r, rcond=None)
        u += step[0]
        c += step[1]
        if c <= 0 or u <= 0:
            raise DragFitError("fit diverged to a non-physical decay")
        if np.max(np.abs(step)) <= 1e-10 * max(abs(u), abs(c)):
            break
    else:
        raise DragFitError(f"fit did not converge in {max_iter} iterations")
    return c * mass


def fit_shared_intercept_slopes(amplitudes, thrusts, groups) -> tuple[float, dict]:
    """Fit lines f = m_g * (A - a) with one shared x-intercept a.

    Returns (a, {group: slope}).  Alternates the closed-form slope update
    with the closed-form intercept update until stationary; both steps
    decrease the squared error, so this converges for any sane data.
    """
    A = np.asarray(amplitudes, dtype=float)
    F = np.asarray(thrusts, dtype=float)
    G = np.asarray(groups)
    if not (A.shape == F.shape == G.shape) or A.ndim != 1:
        raise DragFitError("amplitude/thrust/group columns must match")
    labels = sorted(set(G.tolist()))
    if len(labels) < 2:
        raise DragFitError("need at least two groups (a baseline and one column)")
    masks = {g: G == g for g in labels}
    if any(int(m.sum()) < 2 for m in masks.values()):
        raise DragFitError("every group needs at least two samples")

    a = float(A.min()) - 0.5
    slopes = {g: 1.0 for g in labels}
    for _ in range(200):
        for g, m in masks.items():
            x = A[m] - a
            denom = float(x @ x)
            if denom <= 0:
                raise DragFitError(f"group {g!r} is degenerate at the intercept")
            slopes[g] = float(x @ F[m]) / denom
        num = sum(slopes[g] * float((slopes[g] * A[m] - F[m]).sum()) for g, m in masks.items())
        den = sum(slopes[g] ** 2 * int(m.sum()) for g, m in masks.items())
        a_new = num / den
        if abs(a_new - a) < 1e-12:
            a = a_new
            break
        a = a_new
    return a, slopes
