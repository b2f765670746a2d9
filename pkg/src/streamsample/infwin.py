"""Sampling without replacement from the infinite window by hypergeometric
splitting: each minibatch claims ``kappa ~ H(s, n_i, N_i)`` of the ``s`` slots."""

from __future__ import annotations

from typing import Any, Sequence

from . import par_exec
from .rng import RandomEngine, hypergeometric, static_swor


def kappa_draw(engine: RandomEngine, s: int, n: int, N: int) -> int:
    """Number of sample slots a batch of ``n`` claims once ``N`` elements were seen."""
    return hypergeometric(engine, s, n, N)


class InfWinSampler:
    """Uniform ``min(s, N)``-subset of every element seen so far.

    ``S`` holds payloads and ``positions`` their 1-based stream positions
    (offset by ``start_position``); during warm-up the filled part of both
    arrays is a prefix, so free destinations are computed in O(1).
    """

    def __init__(self, s: int, engine: RandomEngine, start_position: int = 0):
        if s < 1:
            raise ValueError(f"sample size must be >= 1, got {s}")
        self.s = s
        self.engine = engine
        self.start_position = start_position
        self.S: list[Any] = []
        self.positions: list[int] = []
        self.N = 0
        self.batches = 0
        self.work_counter = 0

    def _write(self, idx: int, payload, position: int) -> None:
        self.S[idx] = payload
        self.positions[idx] = position
        par_exec.tick()

    def insert(self, B: Sequence) -> None:
        n = len(B)
        if n == 0:
            return
        self.batches += 1
        rng = self.engine.child(self.batches)
        base = self.start_position + self.N
        N_old, N_new = self.N, self.N + n
        writes = 0
        grow = min(self.s, N_new) - len(self.S)
        self.S.extend([None] * grow)
        self.positions.extend([0] * grow)

        if N_new <= self.s:
            par_exec.parallel_for(n, lambda j, _r: self._write(N_old + j, B[j], base + j + 1))
            writes = n
        else:
            # a straddling batch first fills S; a uniform subset of B taken
            # for that is equivalent to an earlier, separate batch
            fill = max(0, self.s - N_old)
            kappa = kappa_draw(rng.child(1), self.s, n - fill, N_new) if n > fill else 0
            picks, targets = par_exec.parallel_for(
                2,
                lambda t, r: static_swor(r, fill + kappa, n) if t == 0 else static_swor(r, kappa, self.s),
                rng.child(2),
            )
            par_exec.parallel_for(fill, lambda j, _r: self._write(N_old + j, B[picks[j] - 1], base + picks[j]))
            par_exec.parallel_for(
                kappa,
                lambda j, _r: self._write(targets[j] - 1, B[picks[fill + j] - 1], base + picks[fill + j]),
            )
            writes = fill + kappa
        self.N = N_new
        par_exec.tick()
        self.work_counter += writes + 1

    def current_sample(self) -> list:
        return list(self.S)

    def current_positions(self) -> list[int]:
        return list(self.positions)

