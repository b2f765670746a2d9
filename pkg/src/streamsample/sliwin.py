"""Binned-sample store for sampling without replacement from a variable
sliding window.

Each slot keeps its reserved ages in dyadic bins: bin ``k`` holds ages ``j``
with ``2**(k-1) < ceil(j/s) <= 2**k`` (bin 0 holds ``j <= s``).  Every bin also
records ``phi``, the oldest age in it and all younger bins of the slot, so a
query inspects at most two bins per slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from . import par_exec
from .errors import CorruptInput, InvalidArgument, InvalidQuery
from .rng import RandomEngine, coin_flip_ratio, static_swor, uniform_int
from .rr_core import ReservedEntry, ReservedSet, StreamSegment, fast_rr


@dataclass(frozen=True, slots=True)
class StoredSample:
    age: int
    payload: Any = None


@dataclass(frozen=True)
class SampleResult:
    payloads: tuple
    ages: tuple[int, ...]
    bins_visited: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.payloads)


def bin_index(age: int, s: int) -> int:
    """Bin ``k`` with ``2**(k-1) < ceil(age/s) <= 2**k``; 0 when ``age <= s``."""
    c = -(-age // s)
    return (c - 1).bit_length() if c > 1 else 0


@dataclass
class BinnedStore:
    s: int
    W: int
    n_seen: int = 0
    bins: list[list[list[StoredSample]]] = field(default_factory=list)
    phi: list[list[StoredSample | None]] = field(default_factory=list)

    def __post_init__(self):
        if self.s < 1:
            raise InvalidArgument(f"sample size must be >= 1, got {self.s}")
        if self.W < self.s:
            raise InvalidArgument(f"max window {self.W} smaller than sample size {self.s}")
        if not self.bins:
            self.bins = [[[]] for _ in range(self.s)]
            self.phi = [[None] for _ in range(self.s)]

    @property
    def length(self) -> int:
        """Number of stream elements the store currently represents."""
        return min(self.n_seen, self.W)

    @property
    def beta(self) -> int:
        return bin_index(max(self.length, 1), self.s)

    def entries(self) -> list[ReservedEntry]:
        return [
            ReservedEntry(x.age, slot + 1, x.payload)
            for slot, slot_bins in enumerate(self.bins)
            for b in slot_bins
            for x in b
        ]

    def size(self) -> int:
        return sum(len(b) for slot_bins in self.bins for b in slot_bins)

    def table(self) -> list[list[tuple[tuple[int, ...], int | None]]]:
        """Per slot, per bin: (sorted ages, phi).  Handy for inspection and tests."""
        return [
            [(tuple(sorted(x.age for x in b)), None if p is None else p.age) for b, p in zip(slot_bins, slot_phi)]
            for slot_bins, slot_phi in zip(self.bins, self.phi)
        ]

    def validate(self) -> None:
        assert len(self.bins) == self.s and len(self.phi) == self.s
        pairs = set()
        head = []
        for slot, (slot_bins, slot_phi) in enumerate(zip(self.bins, self.phi), start=1):
            assert len(slot_bins) == self.beta + 1 == len(slot_phi), (slot, len(slot_bins), self.beta)
            running = None
            for k, (b, p) in enumerate(zip(slot_bins, slot_phi)):
                for x in b:
                    assert 1 <= x.age <= self.length, (slot, x.age)
                    assert bin_index(x.age, self.s) == k, (slot, x.age, k)
                    assert (x.age, slot) not in pairs, (slot, x.age)
                    pairs.add((x.age, slot))
                    if x.age <= self.s:
                        head.append(x.age)
                    running = x.age if running is None else max(running, x.age)
                assert (None if p is None else p.age) == running, (slot, k, p, running)
        assert len(head) == len(set(head)), "an age <= s occupies two slots"
        assert sorted(head) == list(range(1, min(self.s, self.length) + 1)), "young ages missing"


def _build_slot(samples: list[StoredSample], s: int, beta: int):
    bins: list[list[StoredSample]] = [[] for _ in range(beta + 1)]
    for x in samples:
        bins[bin_index(x.age, s)].append(x)
    phi: list[StoredSample | None] = []
    running = None
    for b in bins:
        for x in b:
            if running is None or x.age > running.age:
                running = x
        phi.append(running)
    par_exec.tick(len(samples) + beta + 1)
    return bins, phi


def rebuild_bins(store: BinnedStore, groups: Sequence[list[StoredSample]] | None = None) -> BinnedStore:
    """Re-bin every stored sample and recompute phi (one pass over the store)."""
    if groups is None:
        groups = [[x for b in slot_bins for x in b] for slot_bins in store.bins]
    beta = store.beta
    built = par_exec.parallel_for(store.s, lambda i, _rng: _build_slot(groups[i], store.s, beta))
    store.bins = [b for b, _ in built]
    store.phi = [p for _, p in built]
    return store


def _group_by_slot(entries: Iterable[ReservedEntry], s: int, limit: int) -> list[list[StoredSample]]:
    groups: list[list[StoredSample]] = [[] for _ in range(s)]
    count = 0
    for e in entries:
        if not 1 <= e.slot <= s:
            raise CorruptInput(f"slot {e.slot} outside [1, {s}]")
        if not 1 <= e.age <= limit:
            raise CorruptInput(f"age {e.age} outside [1, {limit}]")
        groups[e.slot - 1].append(StoredSample(e.age, e.payload))
        count += 1
    par_exec.tick(count)
    return groups


def construct(A: ReservedSet | Iterable[ReservedEntry], n: int, s: int, W: int | None = None) -> BinnedStore:
    """Bin the reserved samples ``A`` of an ``n``-element segment."""
    store = BinnedStore(s=s, W=max(n, s) if W is None else W, n_seen=n)
    if store.length < n:
        raise CorruptInput(f"segment length {n} exceeds max window {store.W}")
    return rebuild_bins(store, _group_by_slot(A, s, n))


def _warmup_sample(store: BinnedStore, q: int, w: int) -> SampleResult:
    young = sorted(
        ((slot, x) for slot, slot_bins in enumerate(store.bins) for x in slot_bins[0] if x.age <= w),
        key=lambda pair: pair[0],
    )[:q]
    par_exec.tick(store.size())
    return SampleResult(tuple(x.payload for _, x in young), tuple(x.age for _, x in young), (1,) * len(young))


def _lookup(slot_bins, slot_phi, k: int, w: int):
    gamma = None
    for x in slot_bins[k]:
        if x.age <= w and (gamma is None or x.age > gamma.age):
            gamma = x
    visited = 1
    if k > 0:
        visited = 2
        prev = slot_phi[k - 1]
        if prev is not None and (gamma is None or prev.age > gamma.age):
            gamma = prev
    par_exec.tick(len(slot_bins[k]) + 1)
    return gamma, visited


def sample(store: BinnedStore, q: int, w: int) -> SampleResult:
    """Uniform ``q``-permutation of the ``w`` newest elements.

    The result is deterministic given the store: it is the first ``q``
    coordinates of the full ``s``-permutation for window ``w``.
    """
    if q < 1:
        raise InvalidQuery(f"sample size must be >= 1, got {q}")
    if store.n_seen < store.s:
        if w < 1 or w > store.n_seen or q > w:
            raise InvalidQuery(f"warm-up store holds {store.n_seen} elements; got q={q}, w={w}")
        return _warmup_sample(store, q, w)
    if q > store.s:
        raise InvalidQuery(f"q={q} exceeds sample size {store.s}")
    if w < store.s or w > store.length:
        raise InvalidQuery(f"window {w} outside [{store.s}, {store.length}]")
    k = bin_index(w, store.s)
    found = par_exec.parallel_for(q, lambda i, _rng: _lookup(store.bins[i], store.phi[i], k, w))
    picks = []
    for slot, (x, _) in enumerate(found, start=1):
        if x is None:
            raise InvalidQuery(f"slot {slot} has no sample within window {w}; store is corrupt")
        picks.append(x)
    return SampleResult(
        tuple(x.payload for x in picks), tuple(x.age for x in picks), tuple(v for _, v in found)
    )


def _shift_slot(store: BinnedStore, slot: int, shift: int, rng: RandomEngine):
    """Age one slot's samples by ``shift`` and downsample; returns (kept, to_reslot)."""
    s, W = store.s, store.W
    kept: list[StoredSample] = []
    moved: list[StoredSample] = []
    count = 0
    for b in store.bins[slot]:
        for x in b:
            count += 1
            i, j = x.age, x.age + shift
            if j > W:
                continue
            if j <= s:
                kept.append(StoredSample(j, x.payload))
            elif i <= s:
                # slots of ages <= s come from one permutation, so they are
                # not independent; a retained sample leaving that range is re-slotted
                if coin_flip_ratio(rng, s, j):
                    moved.append(StoredSample(j, x.payload))
            elif coin_flip_ratio(rng, i, j):
                kept.append(StoredSample(j, x.payload))
    par_exec.tick(max(count, 1))
    return kept, moved


def insert(engine: RandomEngine, store: BinnedStore, B: Sequence) -> BinnedStore:
    """Absorb minibatch ``B``: shift and downsample old samples, sample ``B``, re-bin."""
    if len(B) == 0:
        return store
    s = store.s
    shift = min(len(B), store.W)
    seg = StreamSegment.last(B, shift)

    shifted = par_exec.parallel_for(s, lambda i, rng: _shift_slot(store, i, shift, rng), engine.child(0))
    groups = [kept for kept, _ in shifted]
    reslot_rng = engine.child(1)
    for _, moved in shifted:
        for x in moved:
            groups[uniform_int(reslot_rng, 1, s) - 1].append(x)

    if shift >= s:
        fresh = fast_rr(engine.child(2), seg, s).entries
    else:
        # ages shift+1..s keep distinct slots; the newcomers take a uniform
        # injection into the remaining ones
        used = {slot for slot, g in enumerate(groups, start=1) for x in g if x.age <= s}
        free = [slot for slot in range(1, s + 1) if slot not in used]
        pick = static_swor(engine.child(2), shift, len(free))
        fresh = [ReservedEntry(a, free[pick[a - 1] - 1], seg.at_age(a)) for a in range(1, shift + 1)]
        par_exec.charge_parallel([1] * shift)
    for e in fresh:
        groups[e.slot - 1].append(StoredSample(e.age, e.payload))

    store.n_seen += len(B)
    return rebuild_bins(store, groups)


class SlidingWindowSampler:
    """Stateful wrapper: one engine substream per inserted batch."""

    def __init__(self, s: int, W: int, engine: RandomEngine):
        self.store = BinnedStore(s=s, W=W)
        self.engine = engine
        self.batches = 0

    @classmethod
    def from_reserved(cls, A: ReservedSet, engine: RandomEngine, W: int | None = None) -> "SlidingWindowSampler":
        sampler = cls.__new__(cls)
        sampler.store = construct(A, A.n, A.s, W)
        sampler.engine = engine
        sampler.batches = 1
        return sampler

    @property
    def s(self) -> int:
        return self.store.s

    @property
    def n_seen(self) -> int:
        return self.store.n_seen

    def insert(self, batch: Sequence) -> None:
        if len(batch) == 0:
            return
        self.batches += 1
        insert(self.engine.child(self.batches), self.store, batch)

    def sample(self, q: int, w: int) -> SampleResult:
        return sample(self.store, q, w)
