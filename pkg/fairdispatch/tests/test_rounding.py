"""Dependent rounding: exact decision-tree certification plus sampled degree checks."""

import itertools
import math

import numpy as np
import pytest

from fairdispatch.exceptions import RoundingError
from fairdispatch.rng import SeededRNG
from fairdispatch.rounding import (
    BinaryVector,
    FractionalVector,
    degree_bounds,
    dependent_round,
    round_values,
    rounding_distribution,
)

CORPUS = [
    [0.5],
    [1.0],
    [0.0],
    [0.3, 0.7],
    [0.5, 0.5],
    [0.2, 0.3],
    [0.9, 0.8],
    [1.0, 0.4],
    [0.25, 0.25, 0.25],
    [0.6, 0.6, 0.6],
    [0.1, 0.0, 0.9],
    [0.33, 0.33, 0.34],
    [0.7, 0.2, 0.45, 0.65],
    [0.5, 0.5, 0.5, 0.5],
    [0.05, 0.95, 0.15, 0.85],
    [0.2, 0.4, 0.6, 0.8, 0.1],
    [1.0, 0.0, 0.5, 0.5, 0.3],
    [0.12, 0.34, 0.56, 0.78, 0.9, 0.1],
    [0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
    [0.01, 0.02, 0.03, 0.97, 0.98, 0.99],
]


def _vector(values):
    return FractionalVector(tuple((f"e{k}", v) for k, v in enumerate(values)))


@pytest.mark.parametrize("values", CORPUS)
def test_exact_distribution_properties(values):
    outcomes = rounding_distribution(_vector(values))
    probs = np.array([p for _, p in outcomes])
    bits = np.array([outcome.bits for outcome, _ in outcomes], dtype=float).reshape(len(outcomes), len(values))

    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(probs >= 0)
    np.testing.assert_allclose(probs @ bits, values, atol=1e-12)

    for i, j in itertools.combinations(range(len(values)), 2):
        joint = float(probs @ (bits[:, i] * bits[:, j]))
        assert joint <= values[i] * values[j] + 1e-12

    lo, hi = degree_bounds(values)
    assert all(lo <= sum(outcome.bits) <= hi for outcome, _ in outcomes)


def test_sampled_draws_preserve_degree():
    rng = SeededRNG(11)
    for values in CORPUS:
        lo, hi = degree_bounds(values)
        for _ in range(5000):
            assert lo <= sum(round_values(values, rng.random)) <= hi


def test_sampled_marginals_match():
    values = [0.7, 0.2, 0.45, 0.65]
    rng = SeededRNG(5)
    n = 20000
    counts = np.zeros(len(values))
    for _ in range(n):
        counts += round_values(values, rng.random)
    means = counts / n
    stderr = np.sqrt(np.array(values) * (1 - np.array(values)) / n)
    assert np.all(np.abs(means - values) <= 4 * stderr + 1e-9)


def test_integral_vector_is_unchanged():
    z = _vector([1.0, 0.0, 1.0])
    out = dependent_round(z, SeededRNG(0))
    assert out.as_dict() == {"e0": 1, "e1": 0, "e2": 1}
    assert out.ones == ["e0", "e2"]


def test_half_half_selects_exactly_one():
    rng = SeededRNG(3)
    for _ in range(200):
        assert sum(dependent_round(_vector([0.5, 0.5]), rng).bits) == 1


def test_pairing_probabilities_on_two_entries():
    outcomes = dict((o.bits, p) for o, p in rounding_distribution(_vector([0.3, 0.7])))
    assert outcomes == pytest.approx({(0, 1): 0.7, (1, 0): 0.3})


def test_same_seed_same_draw():
    z = _vector(CORPUS[17])
    assert dependent_round(z, SeededRNG("x")) == dependent_round(z, SeededRNG("x"))


def test_empty_vector():
    assert dependent_round(FractionalVector(()), SeededRNG(0)) == BinaryVector(())
    assert rounding_distribution(FractionalVector(())) == [(BinaryVector(()), 1.0)]


@pytest.mark.parametrize("values", [[1.5], [-0.1], [0.5, math.nan]])
def test_out_of_range_entries(values):
    with pytest.raises(RoundingError):
        _vector(values)


def test_duplicate_keys():
    with pytest.raises(RoundingError):
        FractionalVector((("e", 0.5), ("e", 0.5)))


def test_snap_tolerance():
    out = dependent_round(_vector([1.0 + 1e-13, -1e-13]), SeededRNG(0))
    assert out.bits == (1, 0)


def test_sum_just_above_integer_allows_the_ceiling():
    # LP round-off: the pair step leaves ~1.2e-9 on the second entry, which keeps its own coin
    values = [0.5000000006, 0.5000000006]
    assert degree_bounds(values) == (1, 2)
    assert round_values(values, lambda: 0.0) == [1, 1]
    assert round_values(values, lambda: 0.9) == [0, 1]


def test_residue_within_snapping_slack_is_settled():
    values = [0.5 + 2e-12, 0.5 + 2e-12]
    assert degree_bounds(values) == (1, 1)
    assert round_values(values, lambda: 0.0) == [1, 0]
    outcomes = rounding_distribution(_vector(values))
    assert all(sum(outcome.bits) == 1 for outcome, _ in outcomes)
    assert sum(p for _, p in outcomes) == pytest.approx(1.0, abs=1e-12)
