import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_connected_cells(rng: np.random.Generator, n_max: int = 25,
                           cols_max: int | None = None, rows_max: int | None = None):
    """Random edge-connected cell set spanning >= 2 columns.

    Grown by repeatedly attaching a random unoccupied 4-neighbor, optionally
    boxed into a cols_max x rows_max window.
    """
    n = int(rng.integers(2, n_max + 1))
    cells = {(0, 0)}
    guard = 0
    while len(cells) < n and guard < 10 * n + 100:
        guard += 1
        col, row = list(cells)[int(rng.integers(len(cells)))]
        dc, dr = [(1, 0), (-1, 0), (0, 1), (0, -1)][int(rng.integers(4))]
        cand = (col + dc, row + dr)
        cs = {c for c, _ in cells | {cand}}
        rs = {r for _, r in cells | {cand}}
        if cols_max is not None and max(cs) - min(cs) + 1 > cols_max:
            continue
        if rows_max is not None and max(rs) - min(rs) + 1 > rows_max:
            continue
        cells.add(cand)
    if len({c for c, _ in cells}) < 2:
        col, row = next(iter(cells))
        cells.add((col + 1, row))
    return sorted(cells)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
