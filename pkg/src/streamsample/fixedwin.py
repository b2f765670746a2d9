"""Sampling without replacement from a fixed-size sliding window.

The stream is cut into buckets of ``w`` consecutive positions and each bucket
keeps its own infinite-window sample.  The window always overlaps at most two
buckets: the unexpired part of the old bucket's sample is topped up with a
uniform subsample of the new bucket's sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyStream, InvalidArgument
from .infwin import InfWinSampler
from .rng import RandomEngine, static_swor
from .rr_core import StreamSegment


class InfeasibleCombine(AssertionError):
    """Raised if the new bucket cannot cover the expired part of the old sample."""


@dataclass(frozen=True)
class WindowSample:
    payloads: tuple
    positions: tuple[int, ...]
    from_old: int = 0

    def __len__(self) -> int:
        return len(self.payloads)


class BucketPair:
    """Old and new active bucket samplers for window size ``w``."""

    def __init__(self, w: int, s: int, engine: RandomEngine):
        if s < 1 or w < s:
            raise InvalidArgument(f"need 1 <= s <= w, got s={s}, w={w}")
        self.w = w
        self.s = s
        self.engine = engine
        self.N = 0
        self.bucket_index = 0
        self.oldbkt: InfWinSampler | None = None
        self.newbkt: InfWinSampler = self._fresh_bucket()
        self._retired_work = 0

    def _fresh_bucket(self) -> InfWinSampler:
        # bucket b (1-based) starts after position b*w
        return InfWinSampler(self.s, self.engine.child(self.bucket_index), start_position=self.bucket_index * self.w)

    @property
    def e(self) -> int:
        return self.N % self.w

    @property
    def active_buckets(self) -> int:
        return (self.oldbkt is not None) + (self.newbkt.N > 0)

    @property
    def work_counter(self) -> int:
        return self._retired_work + self.newbkt.work_counter + (self.oldbkt.work_counter if self.oldbkt else 0)

    def insert(self, B: Sequence) -> None:
        n = len(B)
        pos = 0
        while pos < n:
            room = self.w - self.newbkt.N
            take = min(room, n - pos)
            if take == self.w and n - pos - take >= 2 * self.w:
                # whole bucket that will be discarded before any query can see it
                self.bucket_index += 1
                self.N += take
                pos += take
                self._retire(self.oldbkt)
                self.oldbkt = None
                self.newbkt = self._fresh_bucket()
                continue
            self.newbkt.insert(StreamSegment(B, pos, pos + take))
            pos += take
            self.N += take
            if self.newbkt.N == self.w:
                self.bucket_index += 1
                self._retire(self.oldbkt)
                self.oldbkt = self.newbkt
                self.newbkt = self._fresh_bucket()

    def _retire(self, bucket: InfWinSampler | None) -> None:
        if bucket is not None:
            self._retired_work += bucket.work_counter

    def sample(self, engine: RandomEngine) -> WindowSample:
        """Uniform ``min(s, N, w)``-subset of the last ``w`` elements."""
        if self.N == 0:
            raise EmptyStream("no elements observed yet")
        new = self.newbkt
        if self.oldbkt is None or self.e == 0:
            # window lies in one bucket: newbkt while it is the first, else the one just completed
            src = new if self.oldbkt is None else self.oldbkt
            return WindowSample(tuple(src.S), tuple(src.positions))
        oldest_live = self.N - self.w
        old = self.oldbkt
        live = [k for k, p in enumerate(old.positions) if p > oldest_live]
        need = self.s - len(live)
        if need > len(new.S):
            raise InfeasibleCombine(f"need {need} from a new-bucket sample of {len(new.S)}")
        extra = [k - 1 for k in static_swor(engine, need, len(new.S))]
        payloads = tuple(old.S[k] for k in live) + tuple(new.S[k] for k in extra)
        positions = tuple(old.positions[k] for k in live) + tuple(new.positions[k] for k in extra)
        return WindowSample(payloads, positions, from_old=len(live))
