"""Model configuration: populations, rules, matrix entries, run parameters.

A model is immutable once built; :func:`validate` reports problems as a list
of diagnostics instead of raising, so callers can show everything at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .lattice import Lattice
from .world import WorldState, placement_generator

RANDOM_WALK = "random-walk"
FOLLOW_PATH = "follow-path"
DEACTIVATE_NONE = "deactivate-none"
DEACTIVATE_SOURCE = "deactivate-source"

MOVEMENT_ACTIONS = frozenset({RANDOM_WALK, FOLLOW_PATH})
DEACTIVATION_ACTIONS = frozenset({DEACTIVATE_NONE, DEACTIVATE_SOURCE})

# Fixed constants of the walk: one patch per tick, 8 directions.
STEP_LENGTH = 1
DIRECTION_COUNT = 8

#: Default root seed. A fixed constant rather than wall clock, so that runs
#: with no explicit seed are still reproducible.
DEFAULT_SEED = 1729

_MAX_SEED = 2**64


@dataclass(frozen=True)
class PopulationSpec:
    """A named family of agents, all obeying the same matrix entries."""

    name: str
    size: int


@dataclass(frozen=True)
class InteractionRule:
    """Named pairing of one movement action with one deactivation action."""

    name: str
    movement_action: str
    deactivation_action: str


@dataclass(frozen=True)
class InteractionMatrixEntry:
    """One line of a matrix file.

    ``target_family`` and ``distance`` are both present (follow-path entries)
    or both absent (plain walk entries).
    """

    source_family: str
    interaction_name: str
    priority: int
    cardinality: int
    target_family: str | None = None
    distance: float | None = None


@dataclass(frozen=True)
class SimParams:
    lattice_side: int
    beta: float = 1.0          # bias strength of the field-following walk
    seed: int = DEFAULT_SEED
    max_ticks: int = 1000


@dataclass(frozen=True)
class Model:
    lattice: Lattice
    populations: tuple[PopulationSpec, ...]
    rules: tuple[InteractionRule, ...]
    matrix: tuple[InteractionMatrixEntry, ...]
    params: SimParams

    @property
    def population_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.populations)

    def population_sizes(self) -> dict[str, int]:
        return {p.name: p.size for p in self.populations}

    def rules_by_name(self) -> dict[str, InteractionRule]:
        return {r.name: r for r in self.rules}


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def __str__(self) -> str:
        return f"{self.severity}: {self.message}"


def build_model(
    rules,
    matrix,
    side: int,
    sizes: int | Mapping[str, int],
    beta: float = 1.0,
    seed: int = DEFAULT_SEED,
    max_ticks: int = 1000,
) -> Model:
    """Assemble a model from parsed rules and matrix entries.

    Populations are inferred from the matrix in order of first appearance
    (sources before targets, line by line). ``sizes`` is either one uniform
    agent count or a name -> count mapping; mappings may omit names, which
    then fall back to 100.
    """
    names: list[str] = []
    seen: set[str] = set()
    for entry in matrix:
        for name in (entry.source_family, entry.target_family):
            if name is not None and name not in seen:
                seen.add(name)
                names.append(name)
    if isinstance(sizes, int):
        size_of = {name: sizes for name in names}
    else:
        size_of = {name: int(sizes.get(name, 100)) for name in names}
    populations = tuple(PopulationSpec(name, size_of[name]) for name in names)
    return Model(
        lattice=Lattice(side),
        populations=populations,
        rules=tuple(rules),
        matrix=tuple(matrix),
        params=SimParams(lattice_side=side, beta=beta, seed=seed, max_ticks=max_ticks),
    )


def validate(model: Model) -> list[Diagnostic]:
    """Check every invariant and cross-reference of a model.

    Returns an empty error list iff the model is runnable; warnings flag
    suspicious but legal configurations (inert populations, crowding,
    cardinalities above 1).
    """
    out: list[Diagnostic] = []
    err = lambda msg: out.append(Diagnostic("error", msg))
    warn = lambda msg: out.append(Diagnostic("warning", msg))

    pop_names = set()
    for pop in model.populations:
        if not pop.name or any(c.isspace() for c in pop.name):
            err(f"population name {pop.name!r} must be a non-empty token without whitespace")
        if pop.name in pop_names:
            err(f"duplicate population name {pop.name!r}")
        pop_names.add(pop.name)
        if pop.size < 1:
            err(f"population {pop.name!r} must have size >= 1, got {pop.size}")

    rule_names = set()
    for rule in model.rules:
        if rule.name in rule_names:
            err(f"duplicate rule name {rule.name!r}")
        rule_names.add(rule.name)
        if rule.movement_action not in MOVEMENT_ACTIONS:
            err(f"rule {rule.name!r}: unknown movement action {rule.movement_action!r}")
        if rule.deactivation_action not in DEACTIVATION_ACTIONS:
            err(f"rule {rule.name!r}: unknown deactivation action {rule.deactivation_action!r}")

    rules = model.rules_by_name()
    sourced: set[str] = set()
    for i, entry in enumerate(model.matrix):
        where = f"matrix entry {i} ({entry.source_family} {entry.interaction_name})"
        if entry.source_family not in pop_names:
            err(f"{where}: unknown source population {entry.source_family!r}")
        else:
            sourced.add(entry.source_family)
        rule = rules.get(entry.interaction_name)
        if rule is None:
            err(f"{where}: unknown rule {entry.interaction_name!r}")
        if entry.priority < 0:
            err(f"{where}: priority must be nonnegative, got {entry.priority}")
        if entry.cardinality < 0:
            err(f"{where}: cardinality must be nonnegative, got {entry.cardinality}")
        elif entry.cardinality > 1:
            warn(f"{where}: cardinality {entry.cardinality} has no special meaning beyond a count threshold")
        has_target = entry.target_family is not None
        has_distance = entry.distance is not None
        if has_target != has_distance:
            err(f"{where}: target family and distance must be given together")
        if has_target and entry.target_family not in pop_names:
            err(f"{where}: unknown target population {entry.target_family!r}")
        if has_distance and not entry.distance > 0:
            err(f"{where}: distance must be positive, got {entry.distance}")
        if rule is not None:
            if has_target and rule.movement_action != FOLLOW_PATH:
                err(f"{where}: targeted entries must use a {FOLLOW_PATH} rule")
            if not has_target and rule.movement_action != RANDOM_WALK:
                err(f"{where}: targetless entries must use a {RANDOM_WALK} rule")
            if not has_target and rule.deactivation_action == DEACTIVATE_SOURCE:
                warn(f"{where}: {DEACTIVATE_SOURCE} without a target never triggers")

    for pop in model.populations:
        if pop.name not in sourced:
            warn(f"population {pop.name!r} has no matrix entry and will be inert")

    p = model.params
    if p.lattice_side != model.lattice.side:
        err(f"params lattice_side {p.lattice_side} does not match lattice side {model.lattice.side}")
    if p.beta < 0:
        err(f"beta must be nonnegative, got {p.beta}")
    if not 0 <= p.seed < _MAX_SEED:
        err(f"seed must fit in 64 unsigned bits, got {p.seed}")
    if p.max_ticks < 0:
        err(f"max_ticks must be nonnegative, got {p.max_ticks}")

    total = sum(pop.size for pop in model.populations)
    critical = model.lattice.patch_count // 4
    if total > critical:
        warn(
            f"{total} agents exceed the crowding threshold of {critical} "
            f"for {model.lattice.patch_count} patches; movement may freeze"
        )
    return out


def initialize(model: Model, seed: int | None = None) -> WorldState:
    """Scatter every agent uniformly at random and mark all of them active.

    Placement is a pure function of (model, seed): agents are numbered in
    population order and both coordinate arrays come from one counter-based
    stream. Several agents may share a patch.
    """
    if seed is None:
        seed = model.params.seed
    sizes = [pop.size for pop in model.populations]
    n = sum(sizes)
    pop_index = np.repeat(np.arange(len(sizes), dtype=np.int32), sizes)
    gen = placement_generator(seed)
    side = model.lattice.side
    xs = gen.integers(0, side, size=n, dtype=np.int64)
    ys = gen.integers(0, side, size=n, dtype=np.int64)
    return WorldState(
        tick=0,
        side=side,
        population_names=model.population_names,
        population_index=pop_index,
        positions=np.column_stack([xs, ys]),
        active=np.ones(n, dtype=bool),
    )
