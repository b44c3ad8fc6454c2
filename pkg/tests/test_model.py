import numpy as np

from coocsim import build_model, initialize, validate
from coocsim.io import parse_matrix, parse_rules
from coocsim.model import (
    InteractionMatrixEntry,
    InteractionRule,
    Model,
    PopulationSpec,
    SimParams,
)
from coocsim.lattice import Lattice

from reference import make_small_set_model, make_toy_model


def errors(diags):
    return [d for d in diags if d.is_error]


def warnings(diags):
    return [d for d in diags if not d.is_error]


def test_toy_model_validates_clean(rules_text, matrix_toy_text):
    model = build_model(parse_rules(rules_text), parse_matrix(matrix_toy_text),
                        side=51, sizes={"walkers": 200, "particles": 800})
    assert errors(validate(model)) == []


def test_unknown_population_reference_is_an_error(rules_text):
    model = Model(
        lattice=Lattice(31),
        populations=(PopulationSpec("particles", 10),),
        rules=tuple(parse_rules(rules_text)),
        matrix=(
            InteractionMatrixEntry("particles", "walk", 0, 0),
            InteractionMatrixEntry("particles", "cooc", 1, 1, "ghost", 2.0),
        ),
        params=SimParams(lattice_side=31),
    )
    msgs = [d.message for d in errors(validate(model))]
    assert any("ghost" in m for m in msgs)


def test_crowding_warning_above_critical_count():
    model = make_small_set_model(size=100, side=31)  # 1300 agents, threshold 240
    warns = [d.message for d in warnings(validate(model))]
    assert any("240" in m and "1300" in m for m in warns)


def test_inert_population_warns(rules_text):
    model = Model(
        lattice=Lattice(9),
        populations=(PopulationSpec("a", 5), PopulationSpec("b", 5)),
        rules=tuple(parse_rules(rules_text)),
        matrix=(InteractionMatrixEntry("a", "walk", 0, 0),),
        params=SimParams(lattice_side=9),
    )
    warns = [d.message for d in warnings(validate(model))]
    assert any("inert" in m and "'b'" in m for m in warns)


def test_duplicate_names_and_bad_sizes_are_errors(rules_text):
    model = Model(
        lattice=Lattice(9),
        populations=(PopulationSpec("a", 5), PopulationSpec("a", 0)),
        rules=tuple(parse_rules(rules_text)),
        matrix=(InteractionMatrixEntry("a", "walk", 0, 0),),
        params=SimParams(lattice_side=9),
    )
    msgs = [d.message for d in errors(validate(model))]
    assert any("duplicate population" in m for m in msgs)
    assert any("size >= 1" in m for m in msgs)


def test_target_and_distance_must_travel_together(rules_text):
    model = Model(
        lattice=Lattice(9),
        populations=(PopulationSpec("a", 5), PopulationSpec("b", 5)),
        rules=tuple(parse_rules(rules_text)),
        matrix=(
            InteractionMatrixEntry("a", "cooc", 1, 1, "b", None),
            InteractionMatrixEntry("b", "walk", 0, 0),
        ),
        params=SimParams(lattice_side=9),
    )
    msgs = [d.message for d in errors(validate(model))]
    assert any("together" in m for m in msgs)


def test_entry_movement_compatibility(rules_text):
    rules = parse_rules(rules_text)
    model = Model(
        lattice=Lattice(9),
        populations=(PopulationSpec("a", 5), PopulationSpec("b", 5)),
        rules=tuple(rules),
        matrix=(
            InteractionMatrixEntry("a", "walk", 0, 0, "b", 2.0),   # walk with target
            InteractionMatrixEntry("b", "cooc", 1, 1),              # cooc without target
        ),
        params=SimParams(lattice_side=9),
    )
    msgs = [d.message for d in errors(validate(model))]
    assert any("targeted entries" in m for m in msgs)
    assert any("targetless entries" in m for m in msgs)


def test_cardinality_above_one_warns(rules_text):
    matrix = [
        InteractionMatrixEntry("a", "walk", 0, 0),
        InteractionMatrixEntry("b", "walk", 0, 0),
        InteractionMatrixEntry("a", "cooc", 1, 3, "b", 2.0),
    ]
    model = build_model(parse_rules(rules_text), matrix, side=9, sizes=5)
    warns = [d.message for d in warnings(validate(model))]
    assert any("cardinality 3" in m for m in warns)


def test_bad_params_are_errors(rules_text):
    matrix = [InteractionMatrixEntry("a", "walk", 0, 0)]
    model = Model(
        lattice=Lattice(9),
        populations=(PopulationSpec("a", 5),),
        rules=tuple(parse_rules(rules_text)),
        matrix=tuple(matrix),
        params=SimParams(lattice_side=10, beta=-1.0, seed=2**64, max_ticks=-1),
    )
    msgs = [d.message for d in errors(validate(model))]
    assert any("lattice_side" in m for m in msgs)
    assert any("beta" in m for m in msgs)
    assert any("seed" in m for m in msgs)
    assert any("max_ticks" in m for m in msgs)


def test_initialize_is_reproducible():
    model = make_toy_model(seed=123)
    a = initialize(model, 123)
    b = initialize(model, 123)
    assert a.tick == 0
    assert (a.positions == b.positions).all()
    assert (a.population_index == b.population_index).all()
    assert a.active.all() and b.active.all()


def test_initialize_differs_across_seeds():
    model = make_toy_model()
    a = initialize(model, 1)
    b = initialize(model, 2)
    assert (a.positions != b.positions).any()


def test_initialize_places_everyone_in_range():
    model = make_toy_model(walkers=200, particles=800, side=31)
    state = initialize(model, 5)
    assert state.n_agents == 1000
    assert state.positions.min() >= 0
    assert state.positions.max() < 31


def test_population_counts_match_spec_sizes():
    model = make_toy_model(walkers=200, particles=800)
    state = initialize(model, 5)
    counts = np.bincount(state.population_index, minlength=2)
    sizes = {p.name: p.size for p in model.populations}
    names = model.population_names
    assert counts[names.index("walkers")] == sizes["walkers"]
    assert counts[names.index("particles")] == sizes["particles"]
