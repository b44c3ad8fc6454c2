"""Synchronous stepping kernel for interacting agent populations.

Every active agent computes its move from the tick-t snapshot and all moves
apply simultaneously. Movement is either a uniform walk over the 8 lattice
directions or a walk biased by the discrete gradient of an interaction
field: the count of matrix-linked neighbour agents within an entry's
distance. Per-agent randomness is indexed by (seed, tick, agent id), so the
successor state does not depend on iteration order or worker count.

Deactivation is evaluated after the synchronous move: an agent whose
selected entry carries the deactivate-source action freezes in place when
enough target agents (active as of tick t) surround its new position.
Frozen agents keep their patch for the rest of the run.
"""

from __future__ import annotations

import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .lattice import (
    MOORE_OFFSETS,
    OFFSET_ARRAY,
    OFFSET_LENGTHS,
    disk_sum,
    wrap,
    wrapped_delta,
)
from .model import FOLLOW_PATH, DEACTIVATE_SOURCE, Model, initialize
from .world import WorldState, agent_uniforms

__all__ = [
    "ConfigurationFault",
    "TransitionDistribution",
    "RunResult",
    "bias_weights",
    "potential_at",
    "transition_distribution",
    "select_rule",
    "step",
    "run",
]

#: 1 / |2 * offset| per direction, the denominator of the discrete gradient.
_INV_TWO_LEN = 1.0 / (2.0 * OFFSET_LENGTHS)
_INV_TWO_LEN.setflags(write=False)


class ConfigurationFault(RuntimeError):
    """Raised when no matrix entry applies to a population at run time."""


def bias_weights(h_plus: np.ndarray, h_minus: np.ndarray, beta: float) -> np.ndarray:
    """Transition probabilities from field probes at r + d and r - d.

    Raw weight per direction is (1/8) * (1 + beta * (h+ - h-) / |2d|).
    Negative raw weights (large beta against a steep field) clamp to zero
    and the row renormalises; an all-zero row falls back to uniform.
    Accepts a single 8-vector pair or batches with a trailing axis of 8.
    """
    raw = 0.125 * (1.0 + beta * (h_plus - h_minus) * _INV_TWO_LEN)
    raw = np.maximum(raw, 0.0)
    total = raw.sum(axis=-1, keepdims=True)
    safe = np.where(total > 0.0, total, 1.0)
    return np.where(total > 0.0, raw / safe, 0.125)


def _sample_rows(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Invert each row's CDF at the matching uniform draw."""
    cum = np.cumsum(probs, axis=-1)
    return np.minimum((cum < u[..., None]).sum(axis=-1), 7)


@dataclass(frozen=True)
class TransitionDistribution:
    """Probability over the 8 canonical offsets for one agent and tick."""

    probabilities: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.shape != (8,):
            raise ValueError("expected 8 probabilities, one per direction")
        if (probs < 0).any():
            raise ValueError("negative transition probability")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("transition probabilities must sum to 1")
        if probs.flags.writeable:
            probs = probs.copy()
            probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)

    def sample(self, u: float) -> int:
        return int(_sample_rows(self.probabilities[None, :], np.array([u]))[0])


@dataclass(frozen=True)
class _Entry:
    order: int
    priority: int
    cardinality: int
    movement: str
    deactivates: bool
    target: int | None
    distance: float | None


class _Layout:
    """Index-resolved view of a model, built once and reused every tick."""

    def __init__(self, model: Model):
        names = model.population_names
        self.n_pops = len(names)
        self.pop_of = {name: i for i, name in enumerate(names)}
        rules = model.rules_by_name()

        self.entries: list[list[_Entry]] = [[] for _ in range(self.n_pops)]
        groups: list[dict[int, float]] = [{} for _ in range(self.n_pops)]
        for order, raw in enumerate(model.matrix):
            rule = rules.get(raw.interaction_name)
            if (rule is None
                    or raw.source_family not in self.pop_of
                    or (raw.target_family is not None and raw.target_family not in self.pop_of)
                    or (rule is not None and rule.movement_action == FOLLOW_PATH
                        and raw.target_family is None)):
                raise ConfigurationFault(
                    f"matrix entry {order} has unresolved references; validate the model first"
                )
            source = self.pop_of[raw.source_family]
            target = self.pop_of[raw.target_family] if raw.target_family is not None else None
            entry = _Entry(
                order=order,
                priority=raw.priority,
                cardinality=raw.cardinality,
                movement=rule.movement_action,
                deactivates=rule.deactivation_action == DEACTIVATE_SOURCE,
                target=target,
                distance=raw.distance,
            )
            self.entries[source].append(entry)
            if entry.movement == FOLLOW_PATH and target is not None:
                prev = groups[source].get(target)
                if prev is None or entry.distance > prev:
                    groups[source][target] = entry.distance
        # Selection order: highest priority first, file order breaks ties.
        for per_pop in self.entries:
            per_pop.sort(key=lambda e: (-e.priority, e.order))
        # Field groups realise the "any linking entry" reading: a neighbour
        # counts once if it is in range of the widest entry for its family.
        self.field_groups: list[tuple[tuple[int, float], ...]] = [
            tuple(sorted(g.items())) for g in groups
        ]

    def select(self, pop: int, active_counts: np.ndarray) -> _Entry:
        for entry in self.entries[pop]:
            if entry.movement != FOLLOW_PATH:
                return entry
            if active_counts[entry.target] >= entry.cardinality:
                return entry
        raise ConfigurationFault(
            f"no applicable matrix entry for population index {pop}"
        )


_LAYOUTS: "weakref.WeakKeyDictionary[Model, _Layout]" = weakref.WeakKeyDictionary()


def _layout(model: Model) -> _Layout:
    layout = _LAYOUTS.get(model)
    if layout is None:
        layout = _Layout(model)
        _LAYOUTS[model] = layout
    return layout


def _active_counts(state: WorldState, n_pops: int) -> np.ndarray:
    return np.bincount(state.population_index[state.active], minlength=n_pops)


def _occupancy(positions, pop_index, mask, n_pops: int, side: int) -> np.ndarray:
    """Per-population patch occupancy grids, counting only masked agents."""
    flat = (pop_index[mask].astype(np.int64) * side + positions[mask, 0]) * side + positions[mask, 1]
    return np.bincount(flat, minlength=n_pops * side * side).reshape(n_pops, side, side)


def potential_at(candidate, agent_id: int, state: WorldState, model: Model) -> int:
    """Count matrix-linked active neighbours of ``agent_id`` around a patch.

    An agent b of population T counts once when some follow-path entry links
    the agent's population to T and b lies within that entry's distance of
    ``candidate``. The probing agent itself never counts.
    """
    layout = _layout(model)
    side = model.lattice.side
    pop = int(state.population_index[agent_id])
    cand = wrap(candidate, model.lattice)
    total = 0
    for target, distance in layout.field_groups[pop]:
        mask = (state.population_index == target) & state.active
        if not mask.any():
            continue
        pts = state.positions[mask]
        dx = np.abs(pts[:, 0] - cand[0])
        dx = np.minimum(dx, side - dx)
        dy = np.abs(pts[:, 1] - cand[1])
        dy = np.minimum(dy, side - dy)
        count = int((dx * dx + dy * dy <= distance * distance).sum())
        if target == pop and state.active[agent_id]:
            own = state.positions[agent_id]
            odx = wrapped_delta(own[0], cand[0], side)
            ody = wrapped_delta(own[1], cand[1], side)
            if odx * odx + ody * ody <= distance * distance:
                count -= 1
        total += count
    return total


def transition_distribution(agent_id: int, state: WorldState, model: Model) -> TransitionDistribution:
    """Biased-walk law for one active agent, probing the field at r +- d."""
    r = state.positions[agent_id]
    h = np.array(
        [potential_at((r[0] + dx, r[1] + dy), agent_id, state, model) for dx, dy in MOORE_OFFSETS],
        dtype=np.int64,
    )
    # The probe at r - d is the probe at the paired opposite offset.
    probs = bias_weights(h, h[::-1], model.params.beta)
    return TransitionDistribution(probs)


def select_rule(agent_id: int, state: WorldState, model: Model):
    """Highest-priority applicable matrix entry for the agent's population.

    A follow-path entry applies when at least ``cardinality`` active agents
    of its target family exist anywhere; a walk entry always applies. Ties
    break by matrix file order.
    """
    layout = _layout(model)
    counts = _active_counts(state, layout.n_pops)
    entry = layout.select(int(state.population_index[agent_id]), counts)
    return model.matrix[entry.order]


def step(state: WorldState, model: Model, rng_root: int | None = None, workers: int = 1) -> WorldState:
    """Advance the world by one tick.

    Stateless with respect to randomness: the same (state, model, rng_root)
    always yields the same successor. Worker count only partitions the
    per-agent computation and never changes the result.
    """
    if rng_root is None:
        rng_root = model.params.seed
    layout = _layout(model)
    side = model.lattice.side
    n_pops = layout.n_pops
    n = state.n_agents
    pos = state.positions
    pop_index = state.population_index
    active = state.active
    beta = model.params.beta

    u = agent_uniforms(rng_root, state.tick, n)
    counts = np.bincount(pop_index[active], minlength=n_pops)
    occ_active = _occupancy(pos, pop_index, active, n_pops, side)

    selected: list[_Entry | None] = [None] * n_pops
    for p in range(n_pops):
        if counts[p] > 0:
            selected[p] = layout.select(p, counts)

    # Interaction fields for populations stepping with a biased walk. The
    # field of a population is shared by all its agents this tick.
    follow_pops = [
        p for p in range(n_pops)
        if selected[p] is not None and selected[p].movement == FOLLOW_PATH
    ]
    fields: dict[int, np.ndarray] = {}
    group_grids: dict[tuple[int, float], np.ndarray] = {}
    for p in follow_pops:
        field = np.zeros((side, side), dtype=np.int64)
        for target, distance in layout.field_groups[p]:
            key = (target, distance)
            grid = group_grids.get(key)
            if grid is None:
                grid = disk_sum(occ_active[target], side, distance)
                group_grids[key] = grid
            field += grid
        fields[p] = field.reshape(-1)

    # Flat indices of the 8 neighbour patches of every agent.
    px = (pos[:, 0:1] + OFFSET_ARRAY[:, 0]) % side
    py = (pos[:, 1:2] + OFFSET_ARRAY[:, 1]) % side
    probe_idx = px * side + py

    walk_flag = np.zeros(n_pops, dtype=bool)
    for p in range(n_pops):
        if selected[p] is not None and selected[p].movement != FOLLOW_PATH:
            walk_flag[p] = True
    walk_rows_all = active & walk_flag[pop_index]

    move_idx = np.zeros(n, dtype=np.int64)

    def fill_moves(lo: int, hi: int) -> None:
        sl = slice(lo, hi)
        walk_rows = walk_rows_all[sl]
        if walk_rows.any():
            draws = (u[sl][walk_rows] * 8.0).astype(np.int64)
            move_idx[sl][walk_rows] = np.minimum(draws, 7)
        pops_here = pop_index[sl]
        act_here = active[sl]
        for p in follow_pops:
            rows = act_here & (pops_here == p)
            if not rows.any():
                continue
            h_plus = fields[p][probe_idx[sl][rows]]
            # Self-contributions of a self-linking entry cancel between the
            # +d and -d probes, so the raw grid counts are already correct.
            probs = bias_weights(h_plus, h_plus[:, ::-1], beta)
            move_idx[sl][rows] = _sample_rows(probs, u[sl][rows])

    if workers <= 1 or n < 2:
        fill_moves(0, n)
    else:
        bounds = np.linspace(0, n, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda i: fill_moves(bounds[i], bounds[i + 1]), range(workers)))

    moved = (pos + OFFSET_ARRAY[move_idx]) % side
    new_pos = np.where(active[:, None], moved, pos)

    # Deactivation: thresholds are checked against the post-move positions
    # of targets but their tick-t activity flags, so simultaneous freezes do
    # not shadow one another.
    new_active = active.copy()
    occ_new = _occupancy(new_pos, pop_index, active, n_pops, side)
    for p in range(n_pops):
        entry = selected[p]
        if entry is None or not entry.deactivates or entry.target is None:
            continue
        rows = np.nonzero(active & (pop_index == p))[0]
        grid = disk_sum(occ_new[entry.target], side, entry.distance)
        near = grid[new_pos[rows, 0], new_pos[rows, 1]]
        if entry.target == p:
            near = near - 1  # an agent is not its own neighbour
        new_active[rows[near >= entry.cardinality]] = False

    new_pos.setflags(write=False)
    new_active.setflags(write=False)
    return WorldState(
        tick=state.tick + 1,
        side=side,
        population_names=state.population_names,
        population_index=pop_index,
        positions=new_pos,
        active=new_active,
    )


@dataclass(frozen=True)
class RunResult:
    final_state: WorldState
    observations: dict[int, tuple]


def run(
    model: Model,
    report_ticks: Sequence[int] = (),
    observers: Sequence[Callable[[WorldState, Model], object]] = (),
    seed: int | None = None,
    workers: int = 1,
) -> RunResult:
    """Initialize and step to ``max_ticks``, sampling observers on the way.

    Observers are called with (state, model) at each requested tick; their
    return values are collected per tick in observer order. The whole run is
    reproducible from (model, seed).
    """
    if seed is None:
        seed = model.params.seed
    wanted = sorted(set(int(t) for t in report_ticks))
    if wanted and (wanted[0] < 0 or wanted[-1] > model.params.max_ticks):
        raise ValueError("report ticks must lie within [0, max_ticks]")
    state = initialize(model, seed)
    observations: dict[int, tuple] = {}
    if wanted and wanted[0] == 0:
        observations[0] = tuple(obs(state, model) for obs in observers)
    remaining = [t for t in wanted if t > 0]
    for tick in range(1, model.params.max_ticks + 1):
        state = step(state, model, seed, workers)
        if remaining and remaining[0] == tick:
            remaining.pop(0)
            observations[tick] = tuple(obs(state, model) for obs in observers)
    return RunResult(final_state=state, observations=observations)
