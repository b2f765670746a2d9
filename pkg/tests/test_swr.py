import itertools
from collections import Counter

import pytest
from scipy.stats import chisquare

from streamsample.errors import EmptyStream
from streamsample.rng import RandomEngine
from streamsample.swr import SwrSampler, replaced_locations


def test_first_batch_replaces_everything(engine):
    for r in range(200):
        locs = replaced_locations(engine.child(r), 5, 3, 3)
        assert sorted(locs) == [1, 2, 3, 4, 5]


def test_mean_replacements(engine):
    n = 100_000
    mean = sum(len(replaced_locations(engine.child(r), 8, 2, 10)) for r in range(n)) / n
    assert abs(mean - 1.6) <= 0.05


def test_singleton_fills_all(engine):
    smp = SwrSampler(4, engine)
    smp.insert(["z"])
    assert smp.current_sample() == ["z"] * 4
    assert smp.current_positions() == [1] * 4


def test_empty(engine):
    with pytest.raises(EmptyStream):
        SwrSampler(2, engine).current_sample()


def test_positions_match(engine):
    smp = SwrSampler(6, engine)
    stream = list("abcdefghijklmnop")
    smp.insert(stream[:5])
    smp.insert(stream[5:])
    assert [stream[p - 1] for p in smp.current_positions()] == smp.current_sample()


def test_joint_uniform(engine):
    trials = 90_000
    counts = Counter()
    for r in range(trials):
        smp = SwrSampler(2, engine.child(r))
        smp.insert([1])
        smp.insert([2])
        smp.insert([3])
        counts[tuple(smp.current_sample())] += 1
    cells = list(itertools.product([1, 2, 3], repeat=2))
    assert chisquare([counts[c] for c in cells]).pvalue >= 0.001
