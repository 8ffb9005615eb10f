import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from raftsim.lattice import (
    MODULE_INERTIA,
    MODULE_MASS,
    PITCH,
    LatticeError,
    aggregate_inertia,
    build_lattice,
    lattice_from_dict,
    lattice_to_dict,
    load_lattice,
    projection_widths,
    rear_ranks,
    save_lattice,
    structural_matrix,
)

from conftest import random_connected_cells

# ---------------------------------------------------------------------------
# frozen geometry examples


def test_two_abreast_offsets():
    lat = build_lattice([(0, 0), (1, 0)])
    assert lat.x_off == pytest.approx([PITCH / 2, -PITCH / 2])
    assert lat.x_off == pytest.approx([0.0762, -0.0762])
    assert lat.y_off == pytest.approx([0.0, 0.0])


def test_three_abreast_structural_matrix():
    lat = build_lattice([(0, 0), (1, 0), (2, 0)])
    P = structural_matrix(lat)
    assert P.shape == (2, 3)
    assert P[0] == pytest.approx([1.0, 1.0, 1.0])
    assert P[1] == pytest.approx([0.1524, 0.0, -0.1524])


def test_l_shape_offsets_and_ranks():
    # two modules stacked in column 0 plus one beside them in column 1
    lat = build_lattice([(0, 0), (1, 0), (0, 1)])
    # ids are row-major: (0,0), (1,0), (0,1)
    assert lat.cells == ((0, 0), (1, 0), (0, 1))
    assert lat.x_off == pytest.approx([0.0508, -0.1016, 0.0508])
    # rear module of the stacked column sees one cell ahead
    assert rear_ranks(lat).tolist() == [2, 1, 1]
    assert lat.vertical_pairs == ((2, 0),)
    assert lat.horizontal_pairs == ((0, 1),)


def test_row_major_id_order():
    lat = build_lattice([(1, 1), (0, 0), (1, 0), (0, 1)])
    assert lat.cells == ((0, 0), (1, 0), (0, 1), (1, 1))


def test_aggregate_inertia_parallel_rows_match_measured_table():
    # parallel-axis totals for 2..5 modules abreast stay within 2% of the
    # measured per-assembly values (g m^2): 11.8, 36.8, 84.8, 164.0
    measured = {2: 11.8e-3, 3: 36.8e-3, 4: 84.8e-3, 5: 164.0e-3}
    for n, expect in measured.items():
        lat = build_lattice([(c, 0) for c in range(n)])
        mass, inertia = aggregate_inertia(lat)
        assert mass == pytest.approx(n * MODULE_MASS)
        assert inertia == pytest.approx(expect, rel=0.02)


def test_aggregate_inertia_hand_computed():
    lat = build_lattice([(0, 0), (1, 0), (0, 1)])
    mass, inertia = aggregate_inertia(lat)
    # independent parallel-axis sum over both offsets
    xs = [0.0508, -0.1016, 0.0508]
    ys = [-PITCH / 3, -PITCH / 3, 2 * PITCH / 3]
    expect = 3 * MODULE_INERTIA + MODULE_MASS * sum(x * x + y * y for x, y in zip(xs, ys))
    assert inertia == pytest.approx(expect, rel=1e-9)
    assert mass == pytest.approx(3 * MODULE_MASS)


def test_projection_widths():
    assert projection_widths(build_lattice([(0, 0), (1, 0)])) == (2, 2)
    assert projection_widths(build_lattice([(c, 0) for c in range(5)])) == (5, 5)
    assert projection_widths(build_lattice([(0, 0), (1, 0), (0, 1)])) == (2, 2)
    tall = build_lattice([(0, 0), (1, 0), (0, 1), (0, 2)])
    assert projection_widths(tall) == (2, 3)


def test_rear_ranks_deep_column():
    lat = build_lattice([(0, 0), (0, 1), (0, 2), (1, 2)])
    # column 0 rear-to-front ranks 3,2,1; the lone column-1 module is rank 1
    by_cell = dict(zip(lat.cells, rear_ranks(lat).tolist()))
    assert by_cell == {(0, 0): 3, (0, 1): 2, (0, 2): 1, (1, 2): 1}


# ---------------------------------------------------------------------------
# validation


@pytest.mark.parametrize(
    "cells",
    [
        [],
        [(0, 0), (0, 0), (1, 0)],
        [(0, 0), (0, 1)],          # single column
        [(0, 0), (2, 0)],          # gap: not edge-connected
        [(0, 0), (1, 1)],          # diagonal contact does not dock
    ],
)
def test_build_lattice_rejects(cells):
    with pytest.raises(LatticeError):
        build_lattice(cells)


def test_build_lattice_rejects_non_integer_and_bad_scalars():
    with pytest.raises(LatticeError):
        build_lattice([(0.5, 0), (1, 0)])
    with pytest.raises(LatticeError):
        build_lattice([(0, 0), (1, 0)], pitch=0.0)
    with pytest.raises(LatticeError):
        build_lattice([(0, 0), (1, 0)], module_mass=-1.0)


def test_from_dict_unknown_field():
    with pytest.raises(LatticeError, match="unknown"):
        lattice_from_dict({"cells": [[0, 0], [1, 0]], "pitch": 0.2})
    with pytest.raises(LatticeError, match="missing"):
        lattice_from_dict({"pitch_m": 0.2})


def test_dict_round_trip(tmp_path):
    lat = build_lattice([(0, 0), (1, 0), (0, 1)], module_mass=0.7)
    again = lattice_from_dict(lattice_to_dict(lat))
    assert again == lat
    p = tmp_path / "conf.json"
    save_lattice(lat, p)
    assert load_lattice(p) == lat
    # the saved file is plain JSON with cells as [col, row] pairs
    raw = json.loads(p.read_text())
    assert raw["cells"] == [[0, 0], [1, 0], [0, 1]]


# ---------------------------------------------------------------------------
# properties


@given(st.integers(0, 2**32 - 1))
def test_random_lattices_well_formed(seed):
    cells = random_connected_cells(np.random.default_rng(seed), n_max=25)
    lat = build_lattice(cells)
    # ids row-major, offsets centered on the COM, structural row of ones
    assert list(lat.cells) == sorted(lat.cells, key=lambda cr: (cr[1], cr[0]))
    assert abs(lat.x_off.mean()) < 1e-12
    assert abs(lat.y_off.mean()) < 1e-12
    P = structural_matrix(lat)
    assert np.all(P[0] == 1.0)
    mass, inertia = aggregate_inertia(lat)
    assert mass == pytest.approx(lat.n * MODULE_MASS)
    assert inertia >= lat.n * MODULE_INERTIA - 1e-15
    ranks = rear_ranks(lat)
    assert np.all(ranks >= 1)
    # every vertical pair: the front id sits one row ahead of the rear id
    for front, rear in lat.vertical_pairs:
        fc, fr = lat.cells[front]
        rc, rr = lat.cells[rear]
        assert fc == rc and fr == rr + 1


@given(st.integers(0, 2**32 - 1))
def test_pitch_scales_offsets(seed):
    rng = np.random.default_rng(seed)
    cells = random_connected_cells(rng, n_max=10)
    a = build_lattice(cells, pitch=0.1)
    b = build_lattice(cells, pitch=0.3)
    assert b.x_off == pytest.approx(3.0 * a.x_off)
    assert b.y_off == pytest.approx(3.0 * a.y_off)
