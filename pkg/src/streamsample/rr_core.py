"""Reversed reservoir (RR) sampling.

Ages count from the newest element: age 1 is the most recent.  An RR sample
over a segment ``X`` with target size ``s`` picks age ``i`` with probability
``min(1, s/i)`` and assigns it a slot in ``1..s``; ages ``1..s`` always take
the slots of a uniform permutation.  For any suffix of length ``w >= s``, the
oldest age per slot within the suffix forms a uniform ``s``-permutation of it.

:func:`simple_rr` walks every age and serves as a reference oracle.
:func:`fast_rr` splits ages ``> s`` into ``s`` interleaved tracks, runs the
skip-based single-slot sampler on each track in parallel and corrects the
slight oversampling by rejection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Protocol, Sequence

from . import par_exec
from .errors import InvalidArgument, MissingSlot
from .rng import RandomEngine, coin_flip_ratio, random_permutation, skip_offset, uniform_int


class Aged(Protocol):
    def __len__(self) -> int: ...

    def at_age(self, i: int) -> Any: ...


class StreamSegment:
    """Read-only window over ``elements[start:stop]`` addressed by age.

    Slicing a minibatch would copy it; this keeps truncation O(1).
    """

    __slots__ = ("elements", "start", "stop")

    def __init__(self, elements: Sequence, start: int = 0, stop: int | None = None):
        n = len(elements)
        self.elements = elements
        self.stop = n if stop is None else min(stop, n)
        self.start = max(0, min(start, self.stop))

    @classmethod
    def last(cls, elements: Sequence, length: int) -> "StreamSegment":
        n = len(elements)
        return cls(elements, max(0, n - length), n)

    def __len__(self) -> int:
        return self.stop - self.start

    def __getitem__(self, idx: int):
        if not 0 <= idx < len(self):
            raise IndexError(idx)
        return self.elements[self.start + idx]

    def __iter__(self):
        for k in range(self.start, self.stop):
            yield self.elements[k]

    def at_age(self, i: int):
        if not 1 <= i <= len(self):
            raise IndexError(f"age {i} outside segment of length {len(self)}")
        return self.elements[self.stop - i]


def as_segment(X) -> StreamSegment:
    return X if isinstance(X, StreamSegment) else StreamSegment(X)


@dataclass(frozen=True)
class TrackView:
    """Track ``track`` of ``base``: view age ``i`` is base age ``i*s + track`` (i >= 1)."""

    base: Aged
    s: int
    track: int

    def __len__(self) -> int:
        n = len(self.base)
        return (n - self.track) // self.s if self.track <= n else 0

    def base_age(self, i: int) -> int:
        return i * self.s + self.track

    def at_age(self, i: int):
        if not 1 <= i <= len(self):
            raise IndexError(f"view age {i} outside track of length {len(self)}")
        return self.base.at_age(self.base_age(i))


def create_view(X, s: int, track: int) -> TrackView:
    if s < 1 or not 1 <= track <= s:
        raise InvalidArgument(f"track must lie in [1, {s}], got {track}")
    return TrackView(as_segment(X), s, track)


@dataclass(frozen=True, slots=True)
class ReservedEntry:
    age: int
    slot: int
    payload: Any = None


@dataclass
class ReservedSet:
    s: int
    n: int
    entries: list[ReservedEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def pairs(self) -> set[tuple[int, int]]:
        return {(e.age, e.slot) for e in self.entries}

    def validate(self) -> None:
        """Raise AssertionError unless the structural invariants hold."""
        seen = set()
        head_slots = {}
        for e in self.entries:
            assert e.age >= 1 and 1 <= e.slot <= self.s, e
            assert e.age <= self.n, e
            assert (e.age, e.slot) not in seen, f"duplicate pair {e}"
            seen.add((e.age, e.slot))
            if e.age <= self.s:
                assert e.age not in head_slots, f"age {e.age} appears twice"
                head_slots[e.age] = e.slot
        if self.n >= self.s:
            assert sorted(head_slots) == list(range(1, self.s + 1)), "ages 1..s not all present"
            assert len(set(head_slots.values())) == self.s, "head slots not distinct"


def inclusion_prob(s: int, i: int) -> float:
    """``min(1, s/i)``: chance that age ``i`` is kept by an RR sample of size ``s``."""
    if s < 1 or i < 1:
        raise InvalidArgument(f"need s >= 1 and i >= 1, got s={s}, i={i}")
    return min(1.0, s / i)


def _check_size(X, s: int) -> StreamSegment:
    seg = as_segment(X)
    if s < 1 or s > len(seg):
        raise InvalidArgument(f"need 1 <= s <= |X|, got s={s}, |X|={len(seg)}")
    return seg


def _head_entries(engine: RandomEngine, seg: Aged, s: int) -> list[ReservedEntry]:
    perm = random_permutation(engine, s)
    par_exec.charge_parallel([1] * s)
    return [ReservedEntry(i, perm[i - 1], seg.at_age(i)) for i in range(1, s + 1)]


def simple_rr(engine: RandomEngine, X, s: int) -> ReservedSet:
    """Reference RR sampler touching every age; O(|X|) work."""
    seg = _check_size(X, s)
    entries = _head_entries(engine.child(0), seg, s)
    rng = engine.child(1)
    for i in range(s + 1, len(seg) + 1):
        if coin_flip_ratio(rng, s, i):
            entries.append(ReservedEntry(i, uniform_int(rng, 1, s), seg.at_age(i)))
    par_exec.tick(max(0, len(seg) - s))
    return ReservedSet(s, len(seg), entries)


def chi_permutation(A: Iterable[ReservedEntry], s: int, window: int) -> tuple[int, ...]:
    """Oldest age per slot among entries with ``age <= window``, slots ``1..s`` in order."""
    oldest: list[int | None] = [None] * (s + 1)
    for e in A:
        if e.age <= window and (oldest[e.slot] is None or e.age > oldest[e.slot]):
            oldest[e.slot] = e.age
    missing = [slot for slot in range(1, s + 1) if oldest[slot] is None]
    if missing:
        raise MissingSlot(f"slots {missing} have no entry within window {window}")
    return tuple(oldest[1:])  # type: ignore[arg-type]


@dataclass
class SingleRRResult:
    entries: list[ReservedEntry]
    iterations: int


def fast_single_rr_trace(engine: RandomEngine, Y: Aged) -> SingleRRResult:
    """Skip-based RR sampling for one slot, also reporting the loop count."""
    entries = []
    n = len(Y)
    i = 1
    iterations = 0
    while i <= n:
        entries.append(ReservedEntry(i, 1, Y.at_age(i)))
        iterations += 1
        i += skip_offset(engine, i).value
    par_exec.tick(max(iterations, 1))
    return SingleRRResult(entries, iterations)


def fast_single_rr(engine: RandomEngine, Y) -> ReservedSet:
    Y = Y if isinstance(Y, TrackView) else as_segment(Y)
    return ReservedSet(1, len(Y), fast_single_rr_trace(engine, Y).entries)


def _track_entries(engine: RandomEngine, seg: StreamSegment, s: int, track: int) -> list[ReservedEntry]:
    view = TrackView(seg, s, track)
    if len(view) == 0:
        par_exec.tick()
        return []
    picked = fast_single_rr_trace(engine.child(0), view).entries
    rng = engine.child(1)
    out = []
    # rejection then re-slotting, fused into one pass
    for e in picked:
        j = view.base_age(e.age)
        if coin_flip_ratio(rng, e.age * s, j):
            out.append(ReservedEntry(j, uniform_int(rng, 1, s), e.payload))
    par_exec.tick(len(picked))
    return out


def track_samples(engine: RandomEngine, X, s: int) -> list[ReservedEntry]:
    """Entries for ages ``> s`` of an RR sample, one parallel task per track."""
    seg = as_segment(X)
    per_track = par_exec.parallel_for(s, lambda t, rng: _track_entries(rng, seg, s, t + 1), engine)
    return [e for chunk in per_track for e in chunk]


def fast_rr(engine: RandomEngine, X, s: int) -> ReservedSet:
    """RR sample of ``X`` in expected O(s + s log(|X|/s)) work."""
    seg = _check_size(X, s)
    entries = _head_entries(engine.child(0), seg, s)
    entries.extend(track_samples(engine.child(1), seg, s))
    return ReservedSet(s, len(seg), entries)
