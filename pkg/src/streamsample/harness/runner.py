"""Replay a parsed stream against one sampler and collect query records."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .. import par_exec
from ..errors import InvalidArgument, InvalidQuery, SamplingError
from ..fixedwin import BucketPair
from ..infwin import InfWinSampler
from ..rng import RandomEngine, static_swor
from ..sliwin import SlidingWindowSampler
from ..swr import SwrSampler
from .streamfmt import MODES, StreamFrame


@dataclass(frozen=True)
class RunConfig:
    mode: str
    s: int
    seed: int = 0
    W: int | None = None
    w: int | None = None
    workers: int = 1
    test_mode: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidArgument(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.s < 1:
            raise InvalidArgument(f"s must be >= 1, got {self.s}")
        if self.workers < 1:
            raise InvalidArgument(f"workers must be >= 1, got {self.workers}")
        if self.mode == "sliwin" and (self.W is None or self.W < self.s):
            raise InvalidArgument("sliwin mode needs --max-window W >= s")
        if self.mode == "fixedwin" and (self.w is None or self.w < self.s):
            raise InvalidArgument("fixedwin mode needs --window w >= s")


def make_sampler(config: RunConfig):
    engine = RandomEngine(config.seed, (0,))
    if config.mode == "sliwin":
        return SlidingWindowSampler(config.s, config.W, engine)
    if config.mode == "infwin":
        return InfWinSampler(config.s, engine)
    if config.mode == "fixedwin":
        return BucketPair(config.w, config.s, engine)
    return SwrSampler(config.s, engine)


def _subsample(engine: RandomEngine, payloads: list, positions: list, q: int):
    if q >= len(payloads):
        return payloads, positions
    idx = [k - 1 for k in static_swor(engine, q, len(payloads))]
    return [payloads[k] for k in idx], [positions[k] for k in idx]


def answer(config: RunConfig, sampler, q: int, w: int | None, engine: RandomEngine) -> dict:
    """Answer one query; returns the record fields after ``frame``."""
    mode = config.mode
    if q > config.s:
        raise InvalidQuery(f"q={q} exceeds s={config.s}")
    if mode == "sliwin":
        if w is None:
            raise InvalidQuery("sliding-window queries need a window size")
        res = sampler.sample(q, w)
        return {"sample": list(res.payloads), "ages": list(res.ages)}
    if mode == "fixedwin":
        if w is not None and w != config.w:
            raise InvalidQuery(f"window is fixed at {config.w}, got {w}")
        res = sampler.sample(engine.child(0))
        payloads, positions = _subsample(engine.child(1), list(res.payloads), list(res.positions), q)
        return {"sample": payloads, "positions": positions}
    if w is not None:
        raise InvalidQuery(f"{mode} queries take no window size")
    if mode == "infwin":
        payloads, positions = _subsample(engine, sampler.current_sample(), sampler.current_positions(), q)
        return {"sample": payloads, "positions": positions}
    return {"sample": sampler.current_sample()[:q], "positions": sampler.current_positions()[:q]}


def run(config: RunConfig, frames: Iterable[StreamFrame], sampler=None) -> list[dict]:
    """Feed batches in order and emit one record per query frame.

    ``sampler`` may be injected (e.g. a store built from a fixed reserved set).
    Sampler errors become ``{"frame", "error", "message"}`` records.
    """
    if sampler is None:
        sampler = make_sampler(config)
    query_engine = RandomEngine(config.seed, (1,))
    records = []
    with par_exec.workers(config.workers):
        for idx, frame in enumerate(frames):
            if frame.kind == "batch":
                sampler.insert(list(frame.batch))
                continue
            query = frame.query
            assert query is not None
            try:
                fields = answer(config, sampler, query.q, query.w, query_engine.child(idx))
            except SamplingError as exc:
                records.append({"frame": idx, "error": type(exc).__name__, "message": str(exc)})
                continue
            record = {"frame": idx, "mode": config.mode, "q": query.q, "w": query.w, "sample": fields["sample"]}
            if config.test_mode:
                for key in ("ages", "positions"):
                    if key in fields:
                        record[key] = fields[key]
            records.append(record)
    return records
