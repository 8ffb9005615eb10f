"""Geometry of modules docked on a rectangular lattice.

Cells are integer ``(col, row)`` grid coordinates; "front" is the +row
direction.  Linear module ids are row-major: ascending row, then ascending
column, so the rearmost row comes first.  Body-frame offsets use forward =
+y and x decreasing with increasing column (two side-by-side modules at
columns 0,1 sit at x = +pitch/2 and -pitch/2 respectively).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

PITCH = 0.1524  # m, center-to-center spacing of docked modules (= 2 * tail body radius)
MODULE_MASS = 0.66  # kg, single module
MODULE_INERTIA = 2.05e-3  # kg m^2, single module about its own center


class LatticeError(ValueError):
    """Raised for cell sets that cannot form a controllable docked lattice."""


@dataclass(frozen=True)
class Lattice:
    """An immutable docked configuration.

    ``cells`` is stored sorted row-major; index into it with the linear
    module id.  Construct through :func:`build_lattice`, which validates;
    direct construction skips validation (useful only for degenerate
    geometry probes).
    """

    cells: tuple[tuple[int, int], ...]  # ((col, row), ...) sorted by (row, col)
    pitch: float = PITCH  # m
    module_mass: float = MODULE_MASS  # kg
    module_inertia: float = MODULE_INERTIA  # kg m^2

    @property
    def n(self) -> int:
        return len(self.cells)

    @cached_property
    def cols(self) -> np.ndarray:
        return np.array([c for c, _ in self.cells], dtype=float)

    @cached_property
    def rows(self) -> np.ndarray:
        return np.array([r for _, r in self.cells], dtype=float)

    @cached_property
    def x_off(self) -> np.ndarray:
        """Signed body-x offsets from the COM, in meters, by linear id."""
        return (self.cols.mean() - self.cols) * self.pitch

    @cached_property
    def y_off(self) -> np.ndarray:
        """Signed body-y (forward) offsets from the COM, in meters."""
        return (self.rows - self.rows.mean()) * self.pitch

    @cached_property
    def rear_ranks(self) -> np.ndarray:
        """Per-module rank k: 1 + number of occupied cells directly in front."""
        occupied = set(self.cells)
        ranks = []
        for col, row in self.cells:
            ahead = sum(1 for c, r in occupied if c == col and r > row)
            ranks.append(1 + ahead)
        return np.array(ranks, dtype=int)

    @cached_property
    def vertical_pairs(self) -> tuple[tuple[int, int], ...]:
        """(front_id, rear_id) for every vertically adjacent pair."""
        index = {cell: i for i, cell in enumerate(self.cells)}
        pairs = []
        for (col, row), rear in index.items():
            front = index.get((col, row + 1))
            if front is not None:
                pairs.append((front, rear))
        return tuple(sorted(pairs))

    @cached_property
    def horizontal_pairs(self) -> tuple[tuple[int, int], ...]:
        """(left_id, right_id) for every horizontally adjacent pair.

        "left" is the lower column index, i.e. the +x side in the body frame.
        """
        index = {cell: i for i, cell in enumerate(self.cells)}
        pairs = []
        for (col, row), left in index.items():
            right = index.get((col + 1, row))
            if right is not None:
                pairs.append((left, right))
        return tuple(sorted(pairs))


def build_lattice(
    cells,
    pitch: float = PITCH,
    module_mass: float = MODULE_MASS,
    module_inertia: float = MODULE_INERTIA,
) -> Lattice:
    """Validate a cell collection and return the canonical `Lattice`.

    Raises `LatticeError` for: empty/duplicate cells, non-integer
    coordinates, fewer than two distinct columns (single-file lattices are
    uncontrollable in yaw+surge), or an edge-disconnected cell set.
    """
    cell_list = [(int(c), int(r)) for c, r in cells]
    for (c, r), raw in zip(cell_list, cells):
        if (c, r) != (tuple(raw)[0], tuple(raw)[1]):
            raise LatticeError(f"non-integer cell coordinate: {raw!r}")
    if not cell_list:
        raise LatticeError("no cells given")
    if len(set(cell_list)) != len(cell_list):
        raise LatticeError("duplicate cells")
    if pitch <= 0:
        raise LatticeError(f"pitch must be positive, got {pitch}")
    if module_mass <= 0 or module_inertia <= 0:
        raise LatticeError("module mass and inertia must be positive")

    cell_set = frozenset(cell_list)
    if len({c for c, _ in cell_set}) < 2:
        raise LatticeError("lattice must span at least two columns")
    if not _edge_connected(cell_set):
        raise LatticeError("cells are not edge-connected")

    ordered = tuple(sorted(cell_set, key=lambda cr: (cr[1], cr[0])))
    return Lattice(ordered, float(pitch), float(module_mass), float(module_inertia))


def _edge_connected(cells: frozenset[tuple[int, int]]) -> bool:
    # BFS over 4-neighborhoods; diagonal contact does not dock.
    start = next(iter(cells))
    seen = {start}
    frontier = [start]
    while frontier:
        col, row = frontier.pop()
        for nb in ((col + 1, row), (col - 1, row), (col, row + 1), (col, row - 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                frontier.append(nb)
    return len(seen) == len(cells)


def structural_matrix(lat: Lattice) -> np.ndarray:
    """2xN map from per-module forces to (net surge force, net yaw torque)."""
    return np.vstack([np.ones(lat.n), lat.x_off])


def aggregate_inertia(lat: Lattice) -> tuple[float, float]:
    """Total mass and yaw inertia about the COM via the parallel-axis rule."""
    m = lat.n * lat.module_mass
    i = lat.n * lat.module_inertia + lat.module_mass * float(
        np.sum(lat.x_off**2 + lat.y_off**2)
    )
    return m, i


def projection_widths(lat: Lattice) -> tuple[int, int]:
    """(x_width, max_width) in module counts.

    x_width counts distinct columns (the lateral silhouette); max_width is
    the larger of the column and row counts and drives the yaw-drag lookup.
    """
    ncols = len({c for c, _ in lat.cells})
    nrows = len({r for _, r in lat.cells})
    return ncols, max(ncols, nrows)


def rear_ranks(lat: Lattice) -> np.ndarray:
    return lat.rear_ranks


def lattice_to_dict(lat: Lattice) -> dict:
    d: dict = {
        "cells": [[c, r] for c, r in lat.cells],
        "pitch_m": lat.pitch,
    }
    if lat.module_mass != MODULE_MASS:
        d["module_mass_kg"] = lat.module_mass
    if lat.module_inertia != MODULE_INERTIA:
        d["module_inertia_gm2"] = lat.module_inertia * 1e3
    return d


def lattice_from_dict(d: dict) -> Lattice:
    try:
        cells = d["cells"]
    except KeyError:
        raise LatticeError("configuration is missing 'cells'") from None
    unknown = set(d) - {"cells", "pitch_m", "module_mass_kg", "module_inertia_gm2", "notes"}
    if unknown:
        raise LatticeError(f"unknown configuration fields: {sorted(unknown)}")
    return build_lattice(
        cells,
        pitch=d.get("pitch_m", PITCH),
        module_mass=d.get("module_mass_kg", MODULE_MASS),
        module_inertia=d.get("module_inertia_gm2", MODULE_INERTIA * 1e3) * 1e-3,
    )


def load_lattice(path) -> Lattice:
    with open(path, "r", encoding="utf-8") as fh:
        return lattice_from_dict(json.load(fh))


def save_lattice(lat: Lattice, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(lattice_to_dict(lat), fh, indent=2, sort_keys=True)
        fh.write("\n")
