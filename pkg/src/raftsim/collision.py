"""Tail-contact geometry: pairwise collision tests, the (phi1, phi2)
collision map for docked neighbors, the maximum-safe amplitude-ratio sweep,
and the per-cycle no-undock certificate.

Each module's tail sweeps a polar curve around the module center: a disk-ish
body with one protruding tip at the tail angle, tapering linearly with
angular distance from the tip.  The tip direction convention is
(sin(a), -cos(a)): tail angle 0 points rearward (-y), pi points forward.
Two docked neighbors' curves sit 1 pitch apart; a collision is any sampled
boundary point of one curve strictly inside the other.

`outline_radius` is the contact curve (it keeps tapering below the body
radius all the way around); `tail_radius` is the swept envelope (floored at
the body radius) and is the right quantity for clearance-to-hull questions,
but using it for contact would glue every docked pair together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import Lattice

COLLISION_TOL = 1e-6  # m, penetration below this does not count as contact
GAMMA_SAFE_LIMIT = 1.9  # default amplitude-ratio bound enforced by the certificate
#   (conservative: the measured sweep on the stock shape first collides well above it)
FIELD_MARGIN = 2e-3  # m, |field clearance| below this falls back to the exact test


class CollisionError(ValueError):
    pass


@dataclass(frozen=True)
class TailShape:
    body_radius: float = 0.0762  # m
    tip_len: float = 0.015  # m, protrusion beyond the body radius at the tip
    tip_halfwidth: float = 0.62  # rad, angular half-width of the protruding region

    def __post_init__(self):
        if not 0 < self.body_radius:
            raise CollisionError(f"body radius must be positive, got {self.body_radius}")
        if not 0 <= self.tip_len < self.body_radius:
            raise CollisionError("tip protrusion must satisfy 0 <= tip_len < body_radius")
        if not 0 < self.tip_halfwidth < math.pi:
            raise CollisionError("tip halfwidth must be in (0, pi)")


DEFAULT_TAIL = TailShape()


def _wrap(a):
    """Wrap to (-pi, pi], elementwise."""
    return np.pi - np.mod(np.pi - np.asarray(a, dtype=float), 2.0 * np.pi)


def tail_radius(shape: TailShape, theta, phi):
    """Swept-envelope radius at polar angle theta for tail angle phi.

    Floored at the body radius: away from the tip the module presents its
    circular hull.
    """
    taper = 1.0 - np.abs(_wrap(np.asarray(phi, dtype=float) - theta)) / shape.tip_halfwidth
    return shape.body_radius + shape.tip_len * np.maximum(0.0, taper)


def outline_radius(shape: TailShape, delta):
    """Contact-outline radius at angular distance delta from the tail tip.

    The taper continues below the body radius through the whole circle
    (clamped at zero), which is what makes docked neighbors clear each
    other everywhere except tip-to-tip.
    """
    taper = 1.0 - np.abs(_wrap(delta)) / shape.tip_halfwidth
    return np.maximum(0.0, shape.body_radius + shape.tip_len * taper)


def _thetas(n: int) -> np.ndarray:
    return -np.pi + 2.0 * np.pi * np.arange(n) / n


def front_back_offset(pitch: float) -> tuple[float, float]:
    """Center of the rear neighbor relative to the front one (body frame)."""
    return (0.0, -pitch)


def side_offset(pitch: float) -> tuple[float, float]:
    """Center of the right (higher-column) neighbor relative to the left one."""
    return (-pitch, 0.0)


def _pair_clearances(shape, phi1, phi2, offset, boundary_n=1440, chunk=2_000_000):
    """Signed minimum radial margin for paired tail-angle arrays.

    Negative means a sampled boundary point of one curve is inside the
    other.  Vectorized over the pair arrays; chunked to bound memory.
    """
    phi1 = np.atleast_1d(np.asarray(phi1, dtype=float))
    phi2 = np.atleast_1d(np.asarray(phi2, dtype=float))
    if phi1.shape != phi2.shape:
        raise CollisionError("phi1 and phi2 must have the same shape")
    m = phi1.size
    rows = max(1, chunk // max(boundary_n, 1))
    out = np.empty(m)
    th = _thetas(boundary_n)
    ux = np.sin(th)
    uy = -np.cos(th)
    dx, dy = float(offset[0]), float(offset[1])
    for s in range(0, m, rows):
        p1 = phi1[s : s + rows, None]
        p2 = phi2[s : s + rows, None]
        r1 = outline_radius(shape, p1 - th)
        px = r1 * ux - dx
        py = r1 * uy - dy
        m1 = np.hypot(px, py) - outline_radius(shape, p2 - np.arctan2(px, -py))
        r2 = outline_radius(shape, p2 - th)
        qx = r2 * ux + dx
        qy = r2 * uy + dy
        m2 = np.hypot(qx, qy) - outline_radius(shape, p1 - np.arctan2(qx, -qy))
        out[s : s + rows] = np.minimum(m1.min(axis=1), m2.min(axis=1))
    return out


def pair_clearance(shape, phi1: float, phi2: float, offset, boundary_n: int = 1440) -> float:
    return float(_pair_clearances(shape, [phi1], [phi2], offset, boundary_n)[0])


def pair_collides(shape, phi1: float, phi2: float, offset, boundary_n: int = 1440) -> bool:
    """True iff the two tail curves overlap (beyond the 1e-6 m tolerance)."""
    return pair_clearance(shape, phi1, phi2, offset, boundary_n) < -COLLISION_TOL


def _clearance_grid(shape, phi1s, phi2s, offset, boundary_n):
    """Full outer-product clearance grid, shape (len(phi1s), len(phi2s))."""
    phi1s = np.asarray(phi1s, dtype=float)
    phi2s = np.asarray(phi2s, dtype=float)
    th = _thetas(boundary_n)
    ux = np.sin(th)
    uy = -np.cos(th)
    dx, dy = float(offset[0]), float(offset[1])
    out = np.full((phi1s.size, phi2s.size), np.inf)
    for i, p1 in enumerate(phi1s):
        r1 = outline_radius(shape, p1 - th)
        px = r1 * ux - dx
        py = r1 * uy - dy
        rho = np.hypot(px, py)
        psi = np.arctan2(px, -py)
        m = rho - outline_radius(shape, phi2s[:, None] - psi)
        out[i] = m.min(axis=1)
    for j, p2 in enumerate(phi2s):
        r2 = outline_radius(shape, p2 - th)
        qx = r2 * ux + dx
        qy = r2 * uy + dy
        rho = np.hypot(qx, qy)
        psi = np.arctan2(qx, -qy)
        m = rho - outline_radius(shape, phi1s[:, None] - psi)
        np.minimum(out[:, j], m.min(axis=1), out=out[:, j])
    return out


@dataclass(frozen=True)
class CollisionSpace:
    phi1: np.ndarray  # rad, cell centers, ascending
    phi2: np.ndarray
    collides: np.ndarray  # bool, [i, j] for (phi1[i], phi2[j])
    clearance: np.ndarray  # m, signed
    offset: tuple[float, float]  # m, neighbor center offset
    resolution: float  # rad, effective cell size

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("phi1,phi2,collide\n")
            for i, a in enumerate(self.phi1):
                row = self.collides[i]
                for j, b in enumerate(self.phi2):
                    fh.write(f"{float(a)!r},{float(b)!r},{int(row[j])}\n")

    def to_pgm(self, path) -> None:
        """ASCII graymap; top row = highest phi2, collide cells black."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"P2\n{self.phi1.size} {self.phi2.size}\n255\n")
            for j in range(self.phi2.size - 1, -1, -1):
                fh.write(" ".join("0" if c else "255" for c in self.collides[:, j]))
                fh.write("\n")


def collision_space(
    shape: TailShape,
    offset,
    resolution: float = 0.02,
    boundary_n: int = 1440,
) -> CollisionSpace:
    """Boolean collide/clear grid over (phi1, phi2) in (-pi, pi]^2.

    Cells are squares of ~`resolution` rad evaluated at their centers; the
    center lattice is symmetric under negation, so mirror symmetries of the
    pair show up exactly in the grid.
    """
    if not 0 < resolution <= math.pi / 2:
        raise CollisionError(f"resolution must be in (0, pi/2], got {resolution}")
    n = max(8, round(2.0 * math.pi / resolution))
    res = 2.0 * math.pi / n
    centers = -math.pi + res * (np.arange(n) + 0.5)
    grid = _clearance_grid(shape, centers, centers, offset, boundary_n)
    return CollisionSpace(
        phi1=centers,
        phi2=centers.copy(),
        collides=grid < -COLLISION_TOL,
        clearance=grid,
        offset=(float(offset[0]), float(offset[1])),
        resolution=res,
    )


def connected_components(mask: np.ndarray) -> tuple[int, np.ndarray]:
    """4-connected components on the torus (both axes wrap)."""
    n1, n2 = mask.shape
    labels = np.full(mask.shape, -1, dtype=int)
    count = 0
    for i0, j0 in zip(*np.nonzero(mask)):
        if labels[i0, j0] >= 0:
            continue
        stack = [(int(i0), int(j0))]
        labels[i0, j0] = count
        while stack:
            i, j = stack.pop()
            for ni, nj in (
                ((i + 1) % n1, j),
                ((i - 1) % n1, j),
                (i, (j + 1) % n2),
                (i, (j - 1) % n2),
            ):
                if mask[ni, nj] and labels[ni, nj] < 0:
                    labels[ni, nj] = count
                    stack.append((ni, nj))
        count += 1
    return count, labels


# ---------------------------------------------------------------------------
# maximum safe amplitude ratio

@dataclass(frozen=True)
class GammaSearch:
    gamma_max: float
    constrained: bool  # False when the sweep hit its cap without any collision
    resolution: float
    amplitude_bound: float | None
    bracket: tuple[float, float] | None  # (largest clear, smallest colliding)
    trace: tuple[tuple[float, float], ...]  # (slope, min clearance) evaluations


def _ratio_line_clearance(
    shape, gamma, offset, amplitude_bound, samples, boundary_n
) -> float:
    """Min clearance along the in-phase trajectory phi2 = gamma * phi1.

    With an amplitude bound the trajectory is the segment swept by the
    largest admissible pair (A2 = bound, A1 = bound/gamma); unbounded, the
    full line through the origin across the torus square.
    """
    if amplitude_bound is None:
        a1 = math.pi
    else:
        a1 = amplitude_bound / gamma
    s = np.linspace(-1.0, 1.0, samples)
    phi1 = s * a1
    phi2 = gamma * phi1
    return float(_pair_clearances(shape, phi1, phi2, offset, boundary_n).min())


def max_safe_gamma(
    shape: TailShape,
    resolution: float = 1e-3,
    *,
    amplitude_bound: float | None = 2.5,
    pitch: float | None = None,
    sweep_start: float = 1.0,
    sweep_limit: float = 8.0,
    coarse_step: float = 0.05,
    samples: int = 1001,
    boundary_n: int = 1440,
) -> GammaSearch:
    """Largest amplitude ratio whose in-phase trajectory misses the
    front-back collision region; coarse sweep, then bisection to
    `resolution`.  Returns the sweep cap with constrained=False when no
    slope collides (e.g. a tipless shape).
    """
    if resolution <= 0:
        raise CollisionError("resolution must be positive")
    offset = front_back_offset(2.0 * shape.body_radius if pitch is None else pitch)
    trace: list[tuple[float, float]] = []

    def clearance(g: float) -> float:
        c = _ratio_line_clearance(shape, g, offset, amplitude_bound, samples, boundary_n)
        trace.append((g, c))
        return c

    lo = None  # largest slope seen clear
    hi = None  # smallest slope seen colliding
    g = sweep_start
    while g <= sweep_limit + 1e-12:
        if clearance(g) < -COLLISION_TOL:
            hi = g
            break
        lo = g
        g += coarse_step
    if hi is None:
        return GammaSearch(sweep_limit, False, resolution, amplitude_bound, None, tuple(trace))
    if lo is None:
        raise CollisionError(f"trajectory already collides at sweep start {sweep_start}")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if clearance(mid) < -COLLISION_TOL:
            hi = mid
        else:
            lo = mid
    return GammaSearch(
        0.5 * (lo + hi), True, resolution, amplitude_bound, (lo, hi), tuple(trace)
    )


# ---------------------------------------------------------------------------
# clearance field (certificate accelerator)

class ClearanceField:
    """Precomputed clearance over (phi1, phi2) with periodic bilinear lookup.

    Interpolation error stays well under FIELD_MARGIN at the default grid;
    the certificate re-checks any sample whose interpolated clearance falls
    inside that margin with the exact sampler.
    """

    def __init__(self, shape: TailShape, offset, grid_n: int = 640, boundary_n: int = 720):
        self.shape = shape
        self.offset = (float(offset[0]), float(offset[1]))
        self.grid_n = grid_n
        self.boundary_n = boundary_n
        self.step = 2.0 * math.pi / grid_n
        nodes = -np.pi + self.step * np.arange(grid_n)
        self.grid = _clearance_grid(shape, nodes, nodes, self.offset, boundary_n)

    def query(self, phi1, phi2) -> np.ndarray:
        a = np.mod(np.asarray(phi1, dtype=float) + np.pi, 2.0 * np.pi) / self.step
        b = np.mod(np.asarray(phi2, dtype=float) + np.pi, 2.0 * np.pi) / self.step
        i0 = np.floor(a).astype(np.intp) % self.grid_n
        j0 = np.floor(b).astype(np.intp) % self.grid_n
        fa = a - np.floor(a)
        fb = b - np.floor(b)
        i1 = (i0 + 1) % self.grid_n
        j1 = (j0 + 1) % self.grid_n
        g = self.grid
        return (
            (1.0 - fa) * (1.0 - fb) * g[i0, j0]
            + fa * (1.0 - fb) * g[i1, j0]
            + (1.0 - fa) * fb * g[i0, j1]
            + fa * fb * g[i1, j1]
        )


_FIELD_CACHE: dict = {}


def get_clearance_field(
    shape: TailShape, offset, grid_n: int = 640, boundary_n: int = 720
) -> ClearanceField:
    key = (shape, round(float(offset[0]), 12), round(float(offset[1]), 12), grid_n, boundary_n)
    f = _FIELD_CACHE.get(key)
    if f is None:
        f = ClearanceField(shape, offset, grid_n, boundary_n)
        _FIELD_CACHE[key] = f
    return f


# ---------------------------------------------------------------------------
# certificate

@dataclass(frozen=True)
class Violation:
    kind: str  # mixed-frequency | centerline | centerline-mismatch | amplitude-ratio | model-gamma
    detail: str
    modules: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail, "modules": list(self.modules)}


@dataclass(frozen=True)
class Certificate:
    ok: bool
    collision: bool
    min_clearance: float  # m, over all neighbor pairs and time samples
    worst_pair: tuple[int, int] | None  # linear module ids
    worst_time: float | None  # s, within the cycle
    violations: tuple[Violation, ...]
    samples_per_cycle: int

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "collision": self.collision,
            "min_clearance_m": self.min_clearance if math.isfinite(self.min_clearance) else None,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "worst_time_s": self.worst_time,
            "violations": [v.as_dict() for v in self.violations],
            "samples_per_cycle": self.samples_per_cycle,
        }


def _declared_gamma_at(table, rank: int) -> float:
    if table is None or rank < 1:
        return 1.0
    if rank > len(table):
        return 1.0
    return float(table[rank - 1])


def certify_no_undock(
    lat: Lattice,
    commands,
    shape: TailShape = DEFAULT_TAIL,
    samples_per_cycle: int = 720,
    *,
    gamma_limit: float = GAMMA_SAFE_LIMIT,
    declared_gamma=None,
    use_field: bool = True,
    boundary_n: int = 1440,
) -> Certificate:
    """Check one cycle's tail commands for unintended neighbor contact.

    Preconditions checked first: a shared frequency, centerlines restricted
    to {0, pi}, matching centerlines on active vertical pairs, rear/front
    amplitude ratios within `gamma_limit`, and (when `declared_gamma` is
    given, as a per-rank table) the declared compensation ratios of the
    ranks actually present.  Then every horizontal and vertical neighbor
    pair is sampled over a dense, shared time grid across the cycle.  Idle
    modules (A = 0) keep their placeholder centerline out of the matching
    precondition but are still sampled geometrically.
    """
    commands = list(commands)
    if len(commands) != lat.n:
        raise CollisionError(f"{len(commands)} commands for {lat.n} modules")
    if samples_per_cycle < 720:
        raise ValueError(f"samples_per_cycle must be >= 720, got {samples_per_cycle}")

    violations: list[Violation] = []
    omegas = {c.omega for c in commands}
    if len(omegas) != 1:
        violations.append(
            Violation("mixed-frequency", f"commands use {len(omegas)} distinct frequencies")
        )
    for i, c in enumerate(commands):
        if c.centerline not in (0.0, math.pi):
            violations.append(
                Violation("centerline", f"module {i} centerline {c.centerline!r} not in {{0, pi}}", (i,))
            )
        if c.amplitude < 0:
            violations.append(Violation("centerline", f"module {i} has negative amplitude", (i,)))

    for front, rear in lat.vertical_pairs:
        cf, cr = commands[front], commands[rear]
        if cf.amplitude > 0 and cr.amplitude > 0 and cf.centerline != cr.centerline:
            violations.append(
                Violation(
                    "centerline-mismatch",
                    f"vertical pair front={front} rear={rear} disagree on thrust direction",
                    (front, rear),
                )
            )
        if cf.amplitude > 0:
            ratio = cr.amplitude / cf.amplitude
        else:
            ratio = 0.0 if cr.amplitude == 0 else math.inf
        if ratio > gamma_limit * (1.0 + 1e-12):
            violations.append(
                Violation(
                    "amplitude-ratio",
                    f"vertical pair front={front} rear={rear} amplitude ratio {ratio:.4g} "
                    f"exceeds limit {gamma_limit}",
                    (front, rear),
                )
            )

    if declared_gamma is not None and lat.vertical_pairs:
        max_rank = int(lat.rear_ranks.max())
        for k in range(2, max_rank + 1):
            g = _declared_gamma_at(declared_gamma, k)
            if g > gamma_limit * (1.0 + 1e-12):
                violations.append(
                    Violation(
                        "model-gamma",
                        f"declared compensation ratio {g:.4g} at rank {k} exceeds limit {gamma_limit}",
                    )
                )

    # geometric sampling over one cycle, shared time grid
    omega = commands[0].omega
    period = 2.0 * math.pi / omega
    ts = period * np.arange(samples_per_cycle) / samples_per_cycle
    cosw = np.cos(omega * ts)
    phi = np.empty((lat.n, samples_per_cycle))
    for i, c in enumerate(commands):
        phi[i] = c.centerline + c.amplitude * math.cos(c.centerline) * cosw

    pair_sets = [
        (lat.vertical_pairs, front_back_offset(lat.pitch)),
        (lat.horizontal_pairs, side_offset(lat.pitch)),
    ]
    best = math.inf
    worst_pair = None
    worst_time = None
    for pairs, offset in pair_sets:
        if not pairs:
            continue
        ia = np.array([p[0] for p in pairs])
        ib = np.array([p[1] for p in pairs])
        p1 = phi[ia].ravel()
        p2 = phi[ib].ravel()
        if use_field:
            fld = get_clearance_field(shape, offset)
            clr = fld.query(p1, p2)
            near = np.abs(clr) <= FIELD_MARGIN
            if near.any():
                clr[near] = _pair_clearances(shape, p1[near], p2[near], offset, boundary_n)
        else:
            clr = _pair_clearances(shape, p1, p2, offset, boundary_n)
        k = int(np.argmin(clr))
        if clr[k] < best:
            best = float(clr[k])
            worst_pair = tuple(pairs[k // samples_per_cycle])
            worst_time = float(ts[k % samples_per_cycle])

    collision = best < -COLLISION_TOL
    return Certificate(
        ok=not collision and not violations,
        collision=collision,
        min_clearance=best,
        worst_pair=worst_pair,
        worst_time=worst_time,
        violations=tuple(violations),
        samples_per_cycle=samples_per_cycle,
    )
