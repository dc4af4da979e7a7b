"""
fairdispatch - Dependent rounding on a star
Marginal-exact, degree-preserving, negatively correlated rounding of one rider's fractional vector
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, List, Mapping, Sequence, Tuple

from .exceptions import RoundingError
from .rng import SeededRNG
from .settings import SNAP_TOL


@dataclass(frozen=True)
class FractionalVector:
    entries: Tuple[Tuple[Hashable, float], ...]

    def __post_init__(self):
        entries = tuple((key, float(value)) for key, value in self.entries)
        keys = [k for k, _ in entries]
        if len(set(keys)) != len(keys):
            raise RoundingError("fractional vector has duplicate keys")
        for key, value in entries:
            if not (-SNAP_TOL <= value <= 1.0 + SNAP_TOL):
                raise RoundingError(f"entry {key!r} = {value!r} lies outside [0,1]")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_mapping(cls, values: Mapping[Hashable, float]) -> "FractionalVector":
        return cls(tuple(values.items()))

    @property
    def keys(self) -> List[Hashable]:
        return [k for k, _ in self.entries]

    @property
    def values(self) -> List[float]:
        return [v for _, v in self.entries]

    @property
    def total(self) -> float:
        return math.fsum(self.values)


@dataclass(frozen=True)
class BinaryVector:
    entries: Tuple[Tuple[Hashable, int], ...]

    @property
    def ones(self) -> List[Hashable]:
        return [k for k, bit in self.entries if bit]

    def as_dict(self) -> Dict[Hashable, int]:
        return dict(self.entries)

    @property
    def bits(self) -> Tuple[int, ...]:
        return tuple(bit for _, bit in self.entries)


def _snap(value: float) -> float:
    if value <= SNAP_TOL:
        return 0.0
    if value >= 1.0 - SNAP_TOL:
        return 1.0
    return value


def _fractional(z: Sequence[float]) -> List[int]:
    return [i for i, v in enumerate(z) if 0.0 < v < 1.0]


def _pair_step(z: List[float], i: int, j: int) -> Tuple[float, List[float], List[float]]:
    """One pairing move on entries i < j: (probability of up-move, up state, down state)."""
    d1 = min(1.0 - z[i], z[j])
    d2 = min(z[i], 1.0 - z[j])
    up, down = list(z), list(z)
    up[i], up[j] = _snap(z[i] + d1), _snap(z[j] - d1)
    down[i], down[j] = _snap(z[i] - d2), _snap(z[j] + d2)
    return d2 / (d1 + d2), up, down


def _degree_slack(n: int) -> float:
    """Bound on how far snapping can move the running sum over n entries."""
    return SNAP_TOL * (2 * n + 1)


def _settle(value: float, n: int) -> float:
    """Leftover entry within twice the slack of 0 or 1 is settled without a coin."""
    window = 2.0 * _degree_slack(n)
    if value <= window:
        return 0.0
    if value >= 1.0 - window:
        return 1.0
    return value


def degree_bounds(values: Sequence[float]) -> Tuple[int, int]:
    """floor/ceil of the snapped sum; a sum within the snapping slack of an integer counts as that integer."""
    total = math.fsum(_snap(v) for v in values)
    slack = _degree_slack(len(values))
    return math.floor(total + slack), math.ceil(total - slack)


def round_values(values: Sequence[float], draw: Callable[[], float]) -> List[int]:
    """Hot-path rounding over a plain list; ``draw`` returns uniforms in [0,1)."""
    z = [_snap(v) for v in values]
    while True:
        frac = _fractional(z)
        if len(frac) < 2:
            break
        p_up, up, down = _pair_step(z, frac[0], frac[1])
        z = up if draw() < p_up else down
    if len(frac) == 1:
        k = frac[0]
        z[k] = _settle(z[k], len(z))
        if 0.0 < z[k] < 1.0:
            z[k] = 1.0 if draw() < z[k] else 0.0
    bits = [int(v) for v in z]

    lo, hi = degree_bounds(values)
    if not lo <= sum(bits) <= hi:
        raise RoundingError(f"degree preservation broken: sum {sum(bits)} outside [{lo}, {hi}]")
    return bits


def dependent_round(z: FractionalVector, rng: SeededRNG) -> BinaryVector:
    """Z with E[Z_f] = z_f, sum Z in {floor, ceil} of sum z, pairwise negatively correlated.

    Always pairs the two lowest-indexed fractional entries; a leftover single
    fractional entry gets its own coin.
    """
    bits = round_values(z.values, rng.random)
    return BinaryVector(tuple(zip(z.keys, bits)))


def rounding_distribution(z: FractionalVector) -> List[Tuple[BinaryVector, float]]:
    """Exact outcome distribution of dependent_round, by expanding its decision tree."""
    outcomes: Dict[Tuple[int, ...], float] = {}

    def expand(state: List[float], weight: float) -> None:
        if weight == 0.0:
            return
        frac = _fractional(state)
        if len(frac) >= 2:
            p_up, up, down = _pair_step(state, frac[0], frac[1])
            expand(up, weight * p_up)
            expand(down, weight * (1.0 - p_up))
            return
        if len(frac) == 1:
            k = frac[0]
            value = _settle(state[k], len(state))
            one, zero = list(state), list(state)
            one[k], zero[k] = 1.0, 0.0
            expand(one, weight * value)
            expand(zero, weight * (1.0 - value))
            return
        key = tuple(int(v) for v in state)
        outcomes[key] = outcomes.get(key, 0.0) + weight

    expand([_snap(v) for v in z.values], 1.0)
    keys = z.keys
    return [(BinaryVector(tuple(zip(keys, bits))), p) for bits, p in sorted(outcomes.items())]
