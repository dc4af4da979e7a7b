"""Shared fixtures: toy instances small enough for exact enumeration, hardness stars, solved LPs."""

from pathlib import Path

import pytest

from fairdispatch.instance import DriverType, Edge, GeneratorParams, Instance, RiderType, gen_hardness
from fairdispatch.lp import solve_benchmarks

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def make_instance(drivers, riders, edges, horizon):
    """drivers: (id, B); riders: (id, rate, patience); edges: (id, driver, rider, p, w)."""
    return Instance(
        tuple(DriverType(d, b) for d, b in drivers),
        tuple(RiderType(r, rate, patience) for r, rate, patience in riders),
        tuple(Edge(*e) for e in edges),
        horizon,
    )


def single_edge(p=1.0, w=1.0, horizon=1, capacity=1):
    return make_instance([("u", capacity)], [("v", float(horizon), 1)], [("f", "u", "v", p, w)], horizon)


@pytest.fixture
def trips_path():
    return DATA_DIR / "sample_trips.csv"


@pytest.fixture
def hardness5():
    return gen_hardness(5, 0.1)


@pytest.fixture
def toy():
    """Two rounds, mixed capacity and patience; within exact_eval bounds."""
    return make_instance(
        [("u1", 1), ("u2", 2)],
        [("v1", 1.2, 2), ("v2", 0.8, 1)],
        [
            ("f11", "u1", "v1", 0.5, 1.0),
            ("f21", "u2", "v1", 0.7, 0.4),
            ("f22", "u2", "v2", 0.6, 0.9),
        ],
        2,
    )


@pytest.fixture
def toy_corpus(toy):
    """Instances inside the exact_eval bounds."""
    star = make_instance(
        [("a", 1), ("b", 1), ("c", 1)],
        [("v", 3.0, 2)],
        [("fa", "a", "v", 0.4, 1.0), ("fb", "b", "v", 0.6, 0.5), ("fc", "c", "v", 0.9, 0.2)],
        3,
    )
    shared = make_instance(
        [("u1", 2), ("u2", 1)],
        [("v1", 1.5, 1), ("v2", 1.0, 2), ("v3", 0.5, 1)],
        [
            ("e1", "u1", "v1", 0.8, 0.7),
            ("e2", "u2", "v1", 0.5, 1.0),
            ("e3", "u1", "v2", 0.3, 0.6),
            ("e4", "u2", "v2", 0.9, 0.2),
            ("e5", "u2", "v3", 0.5, 0.5),
        ],
        3,
    )
    return [toy, single_edge(0.5, 2.0), gen_hardness(2, 0.5), star, shared]


@pytest.fixture
def unit3x3():
    """Complete 3x3 unit-capacity graph, T = 9."""
    ps = [[0.5, 0.7, 0.3], [0.6, 0.4, 0.8], [0.9, 0.5, 0.5]]
    edges = [
        (f"f{i}{j}", f"u{i}", f"v{j}", ps[i][j], 0.3 + 0.2 * j)
        for i in range(3)
        for j in range(3)
    ]
    return make_instance([(f"u{i}", 1) for i in range(3)], [(f"v{j}", 3.0, 1) for j in range(3)], edges, 9)


@pytest.fixture
def atten4():
    """Unit-capacity 4-driver instance for AttenAlg checks."""
    return make_instance(
        [("u1", 1), ("u2", 1), ("u3", 1), ("u4", 1)],
        [("v1", 3.0, 1), ("v2", 3.0, 1), ("v3", 2.0, 1)],
        [
            ("a1", "u1", "v1", 0.6, 1.0),
            ("a2", "u2", "v1", 0.4, 0.8),
            ("b2", "u2", "v2", 0.7, 0.5),
            ("b3", "u3", "v2", 0.5, 1.0),
            ("c3", "u3", "v3", 0.8, 0.6),
            ("c4", "u4", "v3", 0.3, 0.9),
        ],
        8,
    )


@pytest.fixture
def small_params():
    return GeneratorParams(
        num_driver_types=8,
        num_rider_types=12,
        capacity_bound=3,
        grid_rows=4,
        grid_cols=3,
        rate_mean=2.0,
        rate_stddev=0.5,
        seed=7,
    )


@pytest.fixture
def toy_benchmarks(toy):
    return solve_benchmarks(toy)
