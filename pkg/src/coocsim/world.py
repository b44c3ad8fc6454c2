"""Immutable per-tick world snapshots and the seeded randomness streams."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

# Domain tags keeping the placement stream and the per-tick move streams
# disjoint for a given root seed.
_PLACEMENT_STREAM = 0
_TICK_STREAM = 1


class AgentView(NamedTuple):
    agent_id: int
    population: str
    position: tuple[int, int]
    active: bool


def _owned(arr, dtype) -> np.ndarray:
    out = np.asarray(arr, dtype=dtype)
    if out.flags.writeable:
        out = out.copy()
        out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class WorldState:
    """Snapshot of every agent at one tick.

    Agent ids are row indices into the arrays and stay stable for the whole
    run; agents are never created or destroyed, only deactivated. The side
    of the wrapped world travels with the snapshot so reports need no extra
    context. All arrays are read-only so a snapshot can be shared freely
    across threads.
    """

    tick: int
    side: int
    population_names: tuple[str, ...]
    population_index: np.ndarray  # (n,) int32, static across ticks
    positions: np.ndarray         # (n, 2) int64, wrapped into [0, side)
    active: np.ndarray            # (n,) bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "population_index", _owned(self.population_index, np.int32))
        object.__setattr__(self, "positions", _owned(self.positions, np.int64))
        object.__setattr__(self, "active", _owned(self.active, bool))
        n = self.population_index.shape[0]
        if self.positions.shape != (n, 2) or self.active.shape != (n,):
            raise ValueError("inconsistent agent array shapes")
        if self.tick < 0:
            raise ValueError("tick must be nonnegative")
        if n and (self.positions.min() < 0 or self.positions.max() >= self.side):
            raise ValueError("positions out of lattice range")

    @property
    def n_agents(self) -> int:
        return int(self.population_index.shape[0])

    def population_of(self, agent_id: int) -> str:
        return self.population_names[int(self.population_index[agent_id])]

    def agents(self) -> Iterator[AgentView]:
        for i in range(self.n_agents):
            yield AgentView(
                i,
                self.population_names[int(self.population_index[i])],
                (int(self.positions[i, 0]), int(self.positions[i, 1])),
                bool(self.active[i]),
            )


def placement_generator(seed: int) -> np.random.Generator:
    """Generator used once per run to scatter agents at tick 0."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence((seed, _PLACEMENT_STREAM)))
    )


def agent_uniforms(seed: int, tick: int, n_agents: int) -> np.ndarray:
    """One uniform double per agent slot for the move out of ``tick``.

    The value at index i is a pure function of (seed, tick, i), which makes
    stepping independent of both iteration order and worker count.
    """
    gen = np.random.Generator(
        np.random.Philox(np.random.SeedSequence((seed, _TICK_STREAM, tick)))
    )
    return gen.random(n_agents)
