"""Instance validation, generators, unit-capacity reduction, ingestion and serialization."""

import json
import math

import pandas as pd
import pytest
from pydantic import ValidationError

from fairdispatch.exceptions import IngestError, InvalidInstanceError, InvalidParameterError
from fairdispatch.instance import (
    DISADVANTAGED,
    GeneratorParams,
    Rule,
    build_instance_from_records,
    fold_driver_counts,
    gen_hardness,
    gen_synthetic,
    ingest_trip_records,
    instance_to_dict,
    load_instance,
    load_trip_records,
    record_groups,
    require_valid,
    save_instance,
    to_unit_capacity,
    validate,
)
from fairdispatch.tests.conftest import make_instance


# ============================================================================
# VALIDATION
# ============================================================================

def test_valid_toy_has_no_violations(toy):
    assert validate(toy) == []


def test_validate_reports_every_rule():
    bad = make_instance(
        [("u", 0), ("u", 1)],
        [("v", -1.0, 0)],
        [("f", "u", "v", 0.0, -1.0), ("g", "ghost", "v", 0.5, 1.0)],
        2,
    )
    rules = {v.rule for v in validate(bad)}
    assert {
        Rule.UNIQUE_ID,
        Rule.CAPACITY,
        Rule.ARRIVAL_RATE,
        Rule.PATIENCE,
        Rule.ACCEPT_PROB,
        Rule.WEIGHT,
        Rule.ENDPOINT,
        Rule.RATE_SUM,
    } <= rules


def test_rate_sum_must_equal_horizon():
    inst = make_instance([("u", 1)], [("v", 1.5, 1)], [("f", "u", "v", 0.5, 1.0)], 2)
    with pytest.raises(InvalidInstanceError) as info:
        require_valid(inst)
    assert [v.rule for v in info.value.violations] == [Rule.RATE_SUM]


def test_horizon_must_be_positive():
    inst = make_instance([("u", 1)], [], [], 0)
    assert any(v.rule is Rule.HORIZON for v in validate(inst))


# ============================================================================
# HARDNESS FAMILY
# ============================================================================

@pytest.mark.parametrize("n", [1, 3, 5])
def test_hardness_shape(n):
    inst = gen_hardness(n, 0.1)
    assert len(inst.drivers) == 2 * n
    assert len(inst.riders) == n
    assert len(inst.edges) == 2 * n
    assert inst.horizon == n
    assert inst.is_unit_capacity
    assert validate(inst) == []
    probs = sorted({e.accept_prob for e in inst.edges})
    assert probs == [0.1, 1.0]


@pytest.mark.parametrize("n,eps", [(0, 0.1), (3, 0.0), (3, 1.0), (2, -0.5)])
def test_hardness_rejects_bad_parameters(n, eps):
    with pytest.raises(InvalidParameterError):
        gen_hardness(n, eps)


# ============================================================================
# SYNTHETIC GENERATOR
# ============================================================================

def test_synthetic_is_deterministic(small_params):
    assert instance_to_dict(gen_synthetic(small_params)) == instance_to_dict(gen_synthetic(small_params))


def test_synthetic_seed_changes_instance(small_params):
    other = small_params.model_copy(update={"seed": 8})
    assert instance_to_dict(gen_synthetic(small_params)) != instance_to_dict(gen_synthetic(other))


def test_synthetic_invariants(small_params):
    inst = gen_synthetic(small_params)
    assert validate(inst) == []
    assert math.isclose(sum(r.arrival_rate for r in inst.riders), inst.horizon, abs_tol=1e-9)
    assert all(1 <= d.capacity <= small_params.capacity_bound for d in inst.drivers)
    assert all(r.patience in (1, 2) for r in inst.riders)
    assert all(inst.edges_of_rider[v] for v in range(len(inst.riders)))
    assert sum(d.attributes["group"] == DISADVANTAGED for d in inst.drivers) == len(inst.drivers) // 3
    assert sum(r.attributes["group"] == DISADVANTAGED for r in inst.riders) == len(inst.riders) // 3
    assert max(r.attributes["weight"] for r in inst.riders) <= 1.0


def test_synthetic_acceptance_probabilities(small_params):
    inst = gen_synthetic(small_params)
    drivers = {d.id: d for d in inst.drivers}
    riders = {r.id: r for r in inst.riders}
    for e in inst.edges:
        pair = drivers[e.driver].attributes["group"] + riders[e.rider].attributes["group"]
        base = small_params.base_accept_probs[pair]
        assert e.accept_prob == pytest.approx(0.5 + 0.5 * base)


def test_accept_prob_formula():
    params = GeneratorParams(scale_eta=0.2)
    assert params.accept_prob("A", "A") == pytest.approx(0.2 + 0.8 * 0.6)
    assert params.accept_prob("D", "A") == pytest.approx(0.2 + 0.8 * 0.1)


@pytest.mark.parametrize(
    "update",
    [
        {"scale_eta": 1.5},
        {"capacity_bound": 0},
        {"base_accept_probs": {"AA": 0.5}},
        {"patience_choices": [0]},
        {"window_start": "25:99"},
        {"unknown_field": 1},
    ],
)
def test_generator_params_validation(update):
    with pytest.raises(ValidationError):
        GeneratorParams(**update)


# ============================================================================
# UNIT-CAPACITY REDUCTION
# ============================================================================

def test_unit_capacity_copies(toy):
    unit, mapping = to_unit_capacity(toy)
    assert unit.is_unit_capacity
    assert len(unit.drivers) == toy.total_capacity == 3
    assert mapping == {"u1#0": "u1", "u2#0": "u2", "u2#1": "u2"}
    assert sorted(e.id for e in unit.edges) == ["f11#0", "f21#0", "f21#1", "f22#0", "f22#1"]
    assert unit.riders == toy.riders
    assert validate(unit) == []
    assert {e.id: e.origin for e in unit.edges}["f21#1"] == "f21"


def test_reduced_instance_keeps_edge_origins(tmp_path, toy):
    unit, _ = to_unit_capacity(toy)
    save_instance(unit, tmp_path / "unit.json")
    assert load_instance(tmp_path / "unit.json").edges == unit.edges
    assert "origin" not in instance_to_dict(toy)["edges"][0]


def test_fold_driver_counts():
    mapping = {"u1#0": "u1", "u2#0": "u2", "u2#1": "u2"}
    folded = fold_driver_counts({"u1#0": 0.5, "u2#0": 0.25, "u2#1": 0.5}, mapping)
    assert folded == {"u1": 0.5, "u2": 0.75}


# ============================================================================
# TRIP-RECORD INGESTION
# ============================================================================

def test_load_trip_records_report(trips_path):
    frame, report = load_trip_records(trips_path, GeneratorParams())
    assert report.total_rows == 200
    assert report.malformed_rows == 5
    assert report.outside_window == 14
    assert report.outside_bbox == 11
    assert report.kept_rows == len(frame) == 170
    assert {"pickup_row", "pickup_col", "dropoff_row", "dropoff_col"} <= set(frame.columns)
    assert frame["pickup_row"].between(0, 39).all()
    assert frame["pickup_col"].between(0, 10).all()


def test_window_filter_is_configurable(trips_path):
    _, report = load_trip_records(trips_path, GeneratorParams(window_start="15:00", window_end="18:00"))
    assert report.outside_window == 0


def test_ingest_builds_valid_instance(trips_path):
    inst = ingest_trip_records(trips_path, GeneratorParams(seed=3))
    assert validate(inst) == []
    assert all(inst.edges_of_rider[v] for v in range(len(inst.riders)))
    assert max(r.attributes["weight"] for r in inst.riders) == pytest.approx(1.0)
    again = ingest_trip_records(trips_path, GeneratorParams(seed=3))
    assert instance_to_dict(inst) == instance_to_dict(again)


def test_rider_types_are_distinct_origin_destination_group_triples():
    frame = pd.DataFrame(
        {
            "pickup_row": [1, 1, 1, 2, 2, 1, 3, 3],
            "pickup_col": [1, 1, 1, 2, 2, 1, 0, 0],
            "dropoff_row": [2, 2, 2, 1, 1, 3, 3, 3],
            "dropoff_col": [2, 2, 2, 1, 1, 0, 0, 0],
            "trip_distance": [1.0, 2.5, 1.5, 3.0, 0.5, 4.0, 2.0, 2.0],
        }
    )
    params = GeneratorParams(seed=13)
    driver_groups, rider_groups = record_groups(len(frame), params.seed)
    triples = list(
        zip(
            zip(frame["pickup_row"], frame["pickup_col"]),
            zip(frame["dropoff_row"], frame["dropoff_col"]),
            rider_groups,
        )
    )
    inst = build_instance_from_records(frame, params)
    assert len(inst.riders) == len(set(triples))
    assert len(inst.drivers) == len(set(zip(frame["pickup_row"], frame["pickup_col"], driver_groups)))

    longest = {}
    for key, distance in zip(triples, frame["trip_distance"]):
        longest[key] = max(longest.get(key, 0.0), distance)
    for r in inst.riders:
        a = r.attributes
        key = ((a["origin_row"], a["origin_col"]), (a["dest_row"], a["dest_col"]), a["group"])
        assert a["trip_length"] == longest[key]
        assert a["weight"] == pytest.approx(longest[key] / 4.0)


def test_ingest_downsample_caps_type_counts(trips_path):
    params = GeneratorParams(num_driver_types=10, num_rider_types=20, ingest_downsample=True, seed=3)
    frame, _ = load_trip_records(trips_path, params)
    inst = build_instance_from_records(frame, params)
    assert len(inst.drivers) <= 10
    assert len(inst.riders) <= 20


def test_ingest_missing_file(tmp_path):
    with pytest.raises(IngestError):
        load_trip_records(tmp_path / "absent.csv", GeneratorParams())


def test_ingest_missing_columns(tmp_path):
    path = tmp_path / "trips.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(IngestError):
        load_trip_records(path, GeneratorParams())


def test_ingest_nothing_survives(trips_path):
    with pytest.raises(IngestError):
        load_trip_records(trips_path, GeneratorParams(window_start="03:00", window_end="04:00"))


# ============================================================================
# SERIALIZATION
# ============================================================================

def test_save_and_load_instance(tmp_path, toy):
    path = tmp_path / "nested" / "toy.json"
    save_instance(toy, path)
    assert load_instance(path) == toy
    doc = json.loads(path.read_text())
    assert set(doc) == {"drivers", "riders", "edges", "horizon"}


def test_load_malformed_document(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"drivers": []}))
    with pytest.raises(InvalidParameterError):
        load_instance(path)
