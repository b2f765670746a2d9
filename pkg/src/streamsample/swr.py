"""Sampling with replacement from the infinite window by binomial splitting."""

from __future__ import annotations

from typing import Any, Sequence

from . import par_exec
from .errors import EmptyStream
from .rng import RandomEngine, binomial, static_swor


def replaced_locations(engine: RandomEngine, s: int, n: int, N: int) -> list[int]:
    """Slots (1-based) refreshed by a batch of ``n`` once ``N`` elements were seen.

    Same law as flipping an independent ``n/N`` coin per slot, at O(#replaced) cost.
    """
    count = binomial(engine.child(0), s, n / N)
    return static_swor(engine.child(1), count, s)


class SwrSampler:
    """``s`` independent uniform draws (with replacement) from all elements seen."""

    def __init__(self, s: int, engine: RandomEngine):
        if s < 1:
            raise ValueError(f"sample size must be >= 1, got {s}")
        self.s = s
        self.engine = engine
        self.S: list[Any] = [None] * s
        self.positions = [0] * s
        self.N = 0
        self.batches = 0
        self.work_counter = 0

    def insert(self, B: Sequence) -> None:
        n = len(B)
        if n == 0:
            return
        self.batches += 1
        rng = self.engine.child(self.batches)
        base = self.N
        self.N += n
        locations = replaced_locations(rng.child(0), self.s, n, self.N)

        def overwrite(j: int, r: RandomEngine) -> None:
            k = r.below(n)
            self.S[locations[j] - 1] = B[k]
            self.positions[locations[j] - 1] = base + k + 1
            par_exec.tick()

        par_exec.parallel_for(len(locations), overwrite, rng.child(1))
        par_exec.tick()
        self.work_counter += len(locations) + 1

    def current_sample(self) -> list:
        if self.N == 0:
            raise EmptyStream("no elements observed yet")
        return list(self.S)

    def current_positions(self) -> list[int]:
        if self.N == 0:
            raise EmptyStream("no elements observed yet")
        return list(self.positions)
