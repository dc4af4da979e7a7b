"""Seeded random streams for reproducible trials."""
from __future__ import annotations

import random
from typing import MutableSequence, Sequence, TypeVar

T = TypeVar("T")


class SeededRNG:
    """Wrapper around random.Random for deterministic simulation."""

    def __init__(self, seed: int | str):
        self._rng = random.Random(seed)
        self._seed = seed

    @property
    def seed(self) -> int | str:
        return self._seed

    def random(self) -> float:
        return self._rng.random()

    def uniform(self, a: float, b: float) -> float:
        return self._rng.uniform(a, b)

    def randint(self, a: int, b: int) -> int:
        return self._rng.randint(a, b)

    def bernoulli(self, p: float) -> bool:
        return self._rng.random() < p

    def choice(self, seq: Sequence[T]) -> T:
        return self._rng.choice(seq)

    def shuffle(self, seq: MutableSequence) -> None:
        self._rng.shuffle(seq)

    def fork(self, label: str) -> SeededRNG:
        """Child stream keyed by label, independent of how much of this one was used."""
        return SeededRNG(f"{self._seed}/{label}")


def stream(master_seed: int, trial_index: int, name: str) -> SeededRNG:
    """Stream for one (seed, trial, purpose) triple.

    String seeds are hashed by random.Random, so streams that differ only in
    name do not overlap.
    """
    return SeededRNG(f"{master_seed}:{trial_index}:{name}")
