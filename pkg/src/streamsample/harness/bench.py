"""Counter benchmarks: replay a synthetic stream and record work, span proxy
and store size after every minibatch."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from typing import Iterator

from .. import par_exec
from ..errors import InvalidArgument
from ..rng import RandomEngine, uniform_int
from .runner import RunConfig, make_sampler

CSV_HEADER = ("t", "work", "span_proxy", "store_size")

_SPEC = re.compile(r"^(?P<count>\d+)(?::(?P<law>const|geometric|uniform):(?P<arg>[\d.]+(?:-\d+)?))?$")


@dataclass(frozen=True)
class GeneratorSpec:
    """``count`` elements cut into minibatches by a size law.

    Laws: ``const:K``; ``geometric:M`` (mean ``M``, support ``>= 1``);
    ``uniform:A-B``.  The text form is ``<count>[:<law>:<arg>]``, e.g.
    ``100000:const:1`` or ``4096:uniform:1-64``.
    """

    count: int
    law: str = "const"
    a: float = 1
    b: int = 1

    def __post_init__(self):
        if self.count < 0:
            raise InvalidArgument(f"element count must be >= 0, got {self.count}")
        if self.law not in ("const", "geometric", "uniform"):
            raise InvalidArgument(f"unknown batch-size law {self.law!r}")
        if self.law == "const" and (self.a < 1 or self.a != int(self.a)):
            raise InvalidArgument(f"const batch size must be a positive integer, got {self.a}")
        if self.law == "geometric" and self.a < 1:
            raise InvalidArgument(f"geometric mean batch size must be >= 1, got {self.a}")
        if self.law == "uniform" and not 1 <= self.a <= self.b:
            raise InvalidArgument(f"uniform batch sizes need 1 <= A <= B, got {self.a}-{self.b}")

    @classmethod
    def parse(cls, text: str) -> "GeneratorSpec":
        m = _SPEC.match(text.strip())
        if not m:
            raise InvalidArgument(f"bad generator spec {text!r}; expected <count>[:const:K|:geometric:M|:uniform:A-B]")
        count = int(m["count"])
        law, arg = m["law"], m["arg"]
        if law is None:
            return cls(count)
        if law == "uniform":
            lo, _, hi = arg.partition("-")
            if not hi:
                raise InvalidArgument("uniform law needs A-B")
            return cls(count, law, int(lo), int(hi))
        if "-" in arg:
            raise InvalidArgument(f"{law} law takes a single number")
        return cls(count, law, float(arg) if law == "geometric" else int(arg))

    def sizes(self, engine: RandomEngine) -> Iterator[int]:
        left = self.count
        while left > 0:
            if self.law == "const":
                n = int(self.a)
            elif self.law == "uniform":
                n = uniform_int(engine, int(self.a), self.b)
            else:
                n = 1
                p = 1 / self.a
                while engine.random() >= p:
                    n += 1
            n = min(n, left)
            left -= n
            yield n


@dataclass(frozen=True)
class BenchRow:
    t: int
    work: int
    span_proxy: int
    store_size: int


def _store_size(mode: str, sampler) -> int:
    if mode == "sliwin":
        return sampler.store.size()
    if mode == "fixedwin":
        return sum(len(b.S) for b in (sampler.oldbkt, sampler.newbkt) if b is not None)
    return len(sampler.S)


def bench(config: RunConfig, spec: GeneratorSpec) -> list[BenchRow]:
    """Feed the generated stream and snapshot the counters after each batch.

    ``work`` and ``span_proxy`` are cumulative operation counts charged by the
    sampler since the first batch; the stream itself is generated outside the
    counted region.
    """
    sampler = make_sampler(config)
    sizes_rng = RandomEngine(config.seed, (2,))
    rows = []
    pos = 0
    with par_exec.workers(config.workers):
        par_exec.reset_counters()
        for t, n in enumerate(spec.sizes(sizes_rng), start=1):
            sampler.insert(range(pos, pos + n))
            pos += n
            c = par_exec.counters_snapshot()
            rows.append(BenchRow(t, c.work, c.span_proxy, _store_size(config.mode, sampler)))
    return rows


def to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow((r.t, r.work, r.span_proxy, r.store_size))
    return buf.getvalue()
