"""Fork-join execution with work/span accounting.

Samplers express their parallel loops through :func:`parallel_for` and charge
unit operations with :func:`tick`.  Two counters are kept:

* ``work`` -- total operations across all tasks;
* ``span_proxy`` -- for every parallel region the costliest task, summed over
  regions (sequential operations outside any region count toward both).

Results never depend on the worker count: every task receives an RNG engine
derived from its index, and outputs are collected in index order.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor, wait
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

from .rng import RandomEngine

T = TypeVar("T")

WORKERS_ENV = "STREAMSAMPLE_WORKERS"


@dataclass(frozen=True)
class TaskCounters:
    work: int = 0
    span_proxy: int = 0


class _Tally:
    __slots__ = ("work", "span")

    def __init__(self):
        self.work = 0
        self.span = 0


_root = _Tally()
_root_lock = threading.Lock()
_local = threading.local()
_workers = max(1, int(os.environ.get(WORKERS_ENV, "1") or 1))
_pools: dict[int, ThreadPoolExecutor] = {}


def _current() -> _Tally | None:
    stack = getattr(_local, "stack", None)
    return stack[-1] if stack else None


def _charge(work: int, span: int) -> None:
    tally = _current()
    if tally is None:
        with _root_lock:
            _root.work += work
            _root.span += span
    else:
        tally.work += work
        tally.span += span


def tick(n: int = 1) -> None:
    """Charge ``n`` sequential operations to the enclosing task (or the root)."""
    _charge(n, n)


def charge_parallel(costs: Sequence[int]) -> None:
    """Charge a parallel region whose task costs are known up front."""
    if costs:
        _charge(sum(costs), max(costs))


def counters_snapshot() -> TaskCounters:
    with _root_lock:
        return TaskCounters(_root.work, _root.span)


def reset_counters() -> None:
    with _root_lock:
        _root.work = 0
        _root.span = 0


def get_workers() -> int:
    return _workers


def set_workers(n: int) -> None:
    global _workers
    if n < 1:
        raise ValueError(f"worker count must be >= 1, got {n}")
    _workers = n


@contextmanager
def workers(n: int):
    """Temporarily run parallel regions with ``n`` workers."""
    old = _workers
    set_workers(n)
    try:
        yield
    finally:
        set_workers(old)


def _pool(n: int) -> ThreadPoolExecutor:
    pool = _pools.get(n)
    if pool is None:
        pool = _pools[n] = ThreadPoolExecutor(max_workers=n, thread_name_prefix="streamsample")
    return pool


def _run_task(body, i, engine, tally):
    stack = getattr(_local, "stack", None)
    if stack is None:
        stack = _local.stack = []
    stack.append(tally)
    try:
        return body(i, engine)
    finally:
        stack.pop()


def parallel_for(
    n: int,
    body: Callable[[int, RandomEngine | None], T],
    engine: RandomEngine | None = None,
) -> list[T]:
    """Run ``body(i, engine.child(i))`` for ``i in range(n)`` and join.

    Output order and random streams are identical to a sequential loop.
    Regions nested inside a task run inline on the calling thread.
    """
    if n <= 0:
        return []
    nested = _current() is not None
    if _workers == 1 or n == 1 or nested:
        return _run_inline(n, body, engine)
    engines = [engine.child(i) for i in range(n)] if engine is not None else [None] * n
    tallies = [_Tally() for _ in range(n)]
    futures = [_pool(_workers).submit(_run_task, body, i, engines[i], tallies[i]) for i in range(n)]
    wait(futures)
    results = [f.result() for f in futures]
    _charge(sum(t.work for t in tallies), max(t.span for t in tallies))
    return results


def _run_inline(n, body, engine):
    tally = _Tally()
    stack = getattr(_local, "stack", None)
    if stack is None:
        stack = _local.stack = []
    stack.append(tally)
    results = []
    work = span = 0
    try:
        for i in range(n):
            tally.work = tally.span = 0
            results.append(body(i, engine.child(i) if engine is not None else None))
            work += tally.work
            if tally.span > span:
                span = tally.span
    finally:
        stack.pop()
    _charge(work, span)
    return results
