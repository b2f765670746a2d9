"""Uniform random sampling over minibatch streams.

Samplers for sliding windows (any window size up to a maximum), an infinite
window, fixed-size windows and sampling with replacement, all driven by a
splittable deterministic RNG so results do not depend on the worker count.
"""

from .errors import (
    CorruptInput,
    EmptyStream,
    InvalidArgument,
    InvalidProbability,
    InvalidQuery,
    InvalidRange,
    MissingSlot,
    ParseError,
    SamplingError,
    UnknownSuite,
)
from .fixedwin import BucketPair, InfeasibleCombine, WindowSample
from .infwin import InfWinSampler, kappa_draw
from .rng import (
    RandomEngine,
    SkipOffset,
    binomial,
    coin_flip,
    hypergeometric,
    random_permutation,
    skip_offset,
    static_swor,
    static_swr,
    uniform_int,
)
from .rr_core import (
    ReservedEntry,
    ReservedSet,
    StreamSegment,
    chi_permutation,
    create_view,
    fast_rr,
    fast_single_rr,
    simple_rr,
)
from .sliwin import BinnedStore, SampleResult, SlidingWindowSampler, construct, insert, sample
from .swr import SwrSampler

__version__ = "0.1.0"

__all__ = [
    "BinnedStore",
    "BucketPair",
    "CorruptInput",
    "EmptyStream",
    "InfWinSampler",
    "InfeasibleCombine",
    "InvalidArgument",
    "InvalidProbability",
    "InvalidQuery",
    "InvalidRange",
    "MissingSlot",
    "ParseError",
    "RandomEngine",
    "ReservedEntry",
    "ReservedSet",
    "SampleResult",
    "SamplingError",
    "SkipOffset",
    "SlidingWindowSampler",
    "StreamSegment",
    "SwrSampler",
    "UnknownSuite",
    "WindowSample",
    "binomial",
    "chi_permutation",
    "coin_flip",
    "construct",
    "create_view",
    "fast_rr",
    "fast_single_rr",
    "hypergeometric",
    "insert",
    "kappa_draw",
    "random_permutation",
    "sample",
    "simple_rr",
    "skip_offset",
    "static_swor",
    "static_swr",
    "uniform_int",
]
