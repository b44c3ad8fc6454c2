"""Toroidal square-lattice geometry: Moore offsets, wrapping, distances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

#: The 8 single-step displacements of the Moore neighbourhood, row-major.
#: The offset at index k is the negation of the offset at index 7 - k;
#: the stepping kernel relies on that pairing to read opposite probes.
MOORE_OFFSETS: tuple[tuple[int, int], ...] = (
    (-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1),
)

OFFSET_ARRAY = np.array(MOORE_OFFSETS, dtype=np.int64)
OFFSET_ARRAY.setflags(write=False)

#: Euclidean length of each offset: 1 for axis moves, sqrt(2) for diagonals.
OFFSET_LENGTHS = np.hypot(OFFSET_ARRAY[:, 0], OFFSET_ARRAY[:, 1])
OFFSET_LENGTHS.setflags(write=False)


def neighbor_offsets() -> tuple[tuple[int, int], ...]:
    """Return the 8 single-step displacements in their canonical order."""
    return MOORE_OFFSETS


@dataclass(frozen=True)
class Lattice:
    """Square world of ``side`` x ``side`` unit patches with wrapped edges.

    Sides below 3 are rejected: there the 8-neighbourhood would overlap
    itself and single steps would not be well defined.
    """

    side: int

    def __post_init__(self) -> None:
        if self.side < 3:
            raise ValueError(f"lattice side must be >= 3, got {self.side}")

    @property
    def patch_count(self) -> int:
        return self.side * self.side


def wrap(pos, lattice: Lattice) -> tuple[int, int]:
    """Reduce an integer coordinate pair into [0, side) on both axes."""
    x, y = pos
    return int(x) % lattice.side, int(y) % lattice.side


def wrapped_delta(a: int, b: int, side: int) -> int:
    """Shortest separation of two coordinates on a ring of length ``side``."""
    d = abs(int(a) - int(b)) % side
    return min(d, side - d)


def toroidal_distance(a, b, lattice: Lattice) -> float:
    """Euclidean distance between two patches using wrapped per-axis deltas."""
    dx = wrapped_delta(a[0], b[0], lattice.side)
    dy = wrapped_delta(a[1], b[1], lattice.side)
    return math.hypot(dx, dy)


def within_distance(a, b, side: int, radius: float) -> bool:
    """Inclusion test dist(a, b) <= radius.

    Compared as integer squared distance against radius**2 so that every
    caller (field kernels, neighbourhood reports, oracles) agrees on
    boundary patches regardless of sqrt rounding.
    """
    dx = wrapped_delta(a[0], b[0], side)
    dy = wrapped_delta(a[1], b[1], side)
    return dx * dx + dy * dy <= radius * radius


@lru_cache(maxsize=None)
def disk_offsets(side: int, radius: float) -> np.ndarray:
    """Patch offsets within toroidal distance ``radius`` of a patch.

    Returned as an (k, 2) array of roll shifts in [0, side); each reachable
    patch appears exactly once even when the disk wraps around the world.
    """
    offs = []
    r2 = radius * radius
    for dx in range(side):
        wx = min(dx, side - dx)
        if wx * wx > r2:
            continue
        for dy in range(side):
            wy = min(dy, side - dy)
            if wx * wx + wy * wy <= r2:
                offs.append((dx, dy))
    out = np.array(offs, dtype=np.int64)
    out.setflags(write=False)
    return out


def disk_sum(grid: np.ndarray, side: int, radius: float) -> np.ndarray:
    """out[p] = sum of ``grid`` over the toroidal disk of ``radius`` at p.

    The disk is symmetric, so the roll direction does not matter.
    """
    out = np.zeros_like(grid)
    for dx, dy in disk_offsets(side, radius):
        out += np.roll(grid, (dx, dy), axis=(0, 1))
    return out
