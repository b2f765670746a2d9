import itertools
from collections import Counter

import pytest
from scipy.stats import chisquare

from streamsample.errors import EmptyStream, InvalidArgument
from streamsample.fixedwin import BucketPair
from streamsample.rng import RandomEngine


def feed(bp, sizes, start=1):
    pos = start
    for n in sizes:
        bp.insert(list(range(pos, pos + n)))
        pos += n


def test_boundary_alignment(engine):
    bp = BucketPair(4, 2, engine)
    feed(bp, [2, 2, 2, 2])
    assert bp.e == 0
    assert all(5 <= p <= 8 for p in bp.oldbkt.positions)
    assert bp.newbkt.N == 0


def test_big_batch_keeps_last_two(engine):
    bp = BucketPair(4, 2, engine)
    feed(bp, [1, 12])
    assert all(9 <= p <= 12 for p in bp.oldbkt.positions)
    assert bp.newbkt.current_positions() == [13]
    assert bp.active_buckets == 2


def test_aligned_window_returns_bucket(engine):
    bp = BucketPair(4, 2, engine)
    feed(bp, [4, 4])
    out = bp.sample(RandomEngine(1))
    assert list(out.positions) == bp.oldbkt.current_positions()


def test_first_bucket_partial(engine):
    bp = BucketPair(5, 3, engine)
    feed(bp, [2])
    assert sorted(bp.sample(engine).payloads) == [1, 2]


def test_empty(engine):
    with pytest.raises(EmptyStream):
        BucketPair(4, 2, engine).sample(engine)


def test_bad_config(engine):
    with pytest.raises(InvalidArgument):
        BucketPair(2, 3, engine)


def test_samples_stay_in_window(engine):
    bp = BucketPair(7, 3, engine)
    N = 0
    for t in range(300):
        n = 1 + t % 5
        feed(bp, [n], N + 1)
        N += n
        out = bp.sample(engine.child(t))
        assert len(out.positions) == len(set(out.positions)) == min(3, N)
        assert all(N - 7 < p <= N for p in out.positions)
        assert bp.active_buckets <= 2


@pytest.mark.parametrize("sizes", [[1] * 9, [2, 2, 2, 3], [4, 5], [3, 3, 3]])
def test_uniform_subsets(engine, sizes):
    w, s, trials = 4, 2, 30_000
    t = sum(sizes)
    counts = Counter()
    for r in range(trials):
        bp = BucketPair(w, s, engine.child(r, 0))
        feed(bp, sizes)
        counts[frozenset(bp.sample(engine.child(r, 1)).payloads)] += 1
    cells = [frozenset(c) for c in itertools.combinations(range(t - w + 1, t + 1), s)]
    assert set(counts) <= set(cells)
    assert chisquare([counts[c] for c in cells]).pvalue >= 0.001
