import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coocsim import Lattice, neighbor_offsets, toroidal_distance, wrap
from coocsim.lattice import disk_offsets, disk_sum, within_distance

MOORE = {(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)}


def test_offsets_are_the_eight_moore_displacements():
    offs = neighbor_offsets()
    assert len(offs) == 8
    assert set(offs) == MOORE
    assert (0, 0) not in offs


def test_offsets_sum_to_zero():
    sx = sum(dx for dx, _ in neighbor_offsets())
    sy = sum(dy for _, dy in neighbor_offsets())
    assert (sx, sy) == (0, 0)


def test_mean_squared_offset_length_is_one_and_a_half():
    # enumerate the full direction set: 4 axis moves of length^2 1,
    # 4 diagonal moves of length^2 2
    lengths_sq = [dx * dx + dy * dy for dx, dy in neighbor_offsets()]
    assert sum(lengths_sq) / 8 == pytest.approx(1.5, abs=0)


def test_opposite_offset_pairing():
    offs = neighbor_offsets()
    for k in range(8):
        assert offs[k][0] == -offs[7 - k][0]
        assert offs[k][1] == -offs[7 - k][1]


def test_lattice_rejects_tiny_worlds():
    with pytest.raises(ValueError):
        Lattice(2)
    assert Lattice(3).patch_count == 9


def test_wrap_examples():
    lat = Lattice(31)
    assert wrap((31, 0), lat) == (0, 0)
    assert wrap((-1, 5), lat) == (30, 5)
    assert wrap((15, 15), lat) == (15, 15)


@given(st.integers(-10**9, 10**9), st.integers(-10**9, 10**9), st.integers(3, 200))
def test_wrap_is_total(x, y, side):
    wx, wy = wrap((x, y), Lattice(side))
    assert 0 <= wx < side
    assert 0 <= wy < side


def test_distance_examples():
    lat = Lattice(31)
    assert toroidal_distance((0, 0), (0, 0), lat) == 0.0
    assert toroidal_distance((0, 0), (30, 0), lat) == 1.0
    assert toroidal_distance((0, 0), (3, 4), lat) == 5.0


def test_distance_symmetric_and_zero_iff_equal():
    lat = Lattice(17)
    rng = np.random.default_rng(3)
    for _ in range(200):
        a = tuple(rng.integers(0, 17, 2))
        b = tuple(rng.integers(0, 17, 2))
        assert toroidal_distance(a, b, lat) == toroidal_distance(b, a, lat)
        assert (toroidal_distance(a, b, lat) == 0.0) == (a == b)


def test_triangle_inequality_on_sampled_triples():
    lat = Lattice(31)
    rng = np.random.default_rng(11)
    pts = rng.integers(0, 31, size=(10_000, 3, 2))
    for a, b, c in pts:
        ab = toroidal_distance(a, b, lat)
        bc = toroidal_distance(b, c, lat)
        ac = toroidal_distance(a, c, lat)
        assert ac <= ab + bc + 1e-12


@given(st.integers(3, 60))
def test_distance_bounded_by_half_diagonal(side):
    lat = Lattice(side)
    bound = side * math.sqrt(2) / 2
    rng = np.random.default_rng(side)
    pts = rng.integers(0, side, size=(300, 2, 2))
    for a, b in pts:
        assert toroidal_distance(a, b, lat) <= bound + 1e-12


def test_within_distance_matches_metric():
    lat = Lattice(19)
    rng = np.random.default_rng(5)
    for _ in range(500):
        a = tuple(rng.integers(0, 19, 2))
        b = tuple(rng.integers(0, 19, 2))
        r = float(rng.uniform(0, 15))
        assert within_distance(a, b, 19, r) == (toroidal_distance(a, b, lat) ** 2 <= r * r)


def test_disk_offsets_radius_two_has_thirteen_patches():
    offs = disk_offsets(31, 2.0)
    assert len(offs) == 13


def test_disk_offsets_wrap_without_double_counting():
    # radius larger than half the world: the disk is the whole board, once
    offs = disk_offsets(5, 4.0)
    assert len(offs) == 25
    grid = np.zeros((5, 5), dtype=np.int64)
    grid[2, 2] = 1
    assert (disk_sum(grid, 5, 4.0) == 1).all()


def test_disk_sum_counts_neighbours():
    grid = np.zeros((9, 9), dtype=np.int64)
    grid[4, 4] = 2
    grid[0, 0] = 1
    out = disk_sum(grid, 9, 2.0)
    assert out[4, 4] == 2
    assert out[4, 6] == 2   # distance 2 inclusive
    assert out[4, 7] == 0
    assert out[8, 8] == 1   # wraps around the corner
