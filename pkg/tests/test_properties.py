"""Structural invariants under arbitrary batch sequences."""

from hypothesis import given, settings
from hypothesis import strategies as st

from streamsample import par_exec
from streamsample.fixedwin import BucketPair
from streamsample.infwin import InfWinSampler
from streamsample.rng import RandomEngine, static_swor
from streamsample.rr_core import chi_permutation, fast_rr
from streamsample.sliwin import SlidingWindowSampler
from streamsample.swr import SwrSampler

seeds = st.integers(0, 2**64 - 1)
batches = st.lists(st.integers(1, 12), min_size=1, max_size=12)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, s=st.integers(1, 4), extra=st.integers(0, 9), sizes=batches)
def test_sliwin_invariants(seed, s, extra, sizes):
    W = s + extra
    smp = SlidingWindowSampler(s, W, RandomEngine(seed))
    N = 0
    for n in sizes:
        smp.insert(list(range(N + 1, N + n + 1)))
        N += n
        smp.store.validate()
        length = min(N, W)
        if N < s:
            continue
        for w in range(s, length + 1):
            res = smp.sample(s, w)
            assert len(set(res.ages)) == s and max(res.ages) <= w
            assert all(p == N - a + 1 for p, a in zip(res.payloads, res.ages))
            assert max(res.bins_visited) <= 2


@settings(max_examples=60, deadline=None)
@given(seed=seeds, s=st.integers(1, 5), n=st.integers(1, 60))
def test_fast_rr_structure(seed, s, n):
    if n < s:
        n = s
    A = fast_rr(RandomEngine(seed), range(n), s)
    A.validate()
    perm = chi_permutation(A, s, n)
    assert len(set(perm)) == s


@settings(max_examples=60, deadline=None)
@given(seed=seeds, s=st.integers(1, 5), sizes=batches)
def test_infwin_and_swr_positions(seed, s, sizes):
    inf = InfWinSampler(s, RandomEngine(seed))
    swr = SwrSampler(s, RandomEngine(seed, (1,)))
    N = 0
    for n in sizes:
        batch = list(range(N + 1, N + n + 1))
        inf.insert(batch)
        swr.insert(batch)
        N += n
        assert inf.current_sample() == inf.current_positions()
        assert len(set(inf.current_sample())) == min(s, N)
        assert all(1 <= p <= N for p in swr.current_sample())


@settings(max_examples=60, deadline=None)
@given(seed=seeds, s=st.integers(1, 3), extra=st.integers(0, 5), sizes=batches)
def test_fixedwin_window(seed, s, extra, sizes):
    w = s + extra
    bp = BucketPair(w, s, RandomEngine(seed))
    N = 0
    for n in sizes:
        bp.insert(list(range(N + 1, N + n + 1)))
        N += n
        out = bp.sample(RandomEngine(seed, (9, N)))
        assert len(set(out.payloads)) == min(s, N)
        assert all(N - w < p <= N for p in out.payloads)
        assert bp.active_buckets <= 2


@settings(max_examples=30, deadline=None)
@given(seed=seeds, sizes=batches)
def test_worker_count_irrelevant(seed, sizes):
    traces = []
    for n in (1, 2, 8):
        with par_exec.workers(n):
            smp = SlidingWindowSampler(3, 20, RandomEngine(seed))
            inf = InfWinSampler(3, RandomEngine(seed))
            for k in sizes:
                smp.insert(list(range(k)))
                inf.insert(list(range(k)))
            traces.append((smp.store.table(), inf.current_sample(), fast_rr(RandomEngine(seed), range(50), 4).pairs()))
    assert traces[0] == traces[1] == traces[2]


@given(seed=seeds, n=st.integers(0, 40), data=st.data())
def test_swor_distinct(seed, n, data):
    s = data.draw(st.integers(0, n))
    out = static_swor(RandomEngine(seed), s, n)
    assert len(out) == len(set(out)) == s and all(1 <= v <= n for v in out)
