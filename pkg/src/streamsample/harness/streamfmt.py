"""Text stream format.

::

    # comment
    #batch 3
    alpha
    beta
    gamma
    ?sample 2 3

``#batch <n>`` is followed by exactly ``n`` payload lines (opaque UTF-8
tokens).  ``?sample <q> [<w>]`` asks for a sample of size ``q``; ``w`` is the
window size and is required in sliding-window mode.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from ..errors import ParseError

MODES = ("sliwin", "infwin", "fixedwin", "swr")


@dataclass(frozen=True)
class Query:
    q: int
    w: int | None = None
    mode: str | None = None


@dataclass(frozen=True)
class StreamFrame:
    kind: str  # "batch" or "query"
    batch: tuple[str, ...] = ()
    query: Query | None = None
    line: int = 0

    @classmethod
    def of_batch(cls, items: Iterable[str], line: int = 0) -> "StreamFrame":
        return cls("batch", tuple(items), None, line)

    @classmethod
    def of_query(cls, q: int, w: int | None = None, mode: str | None = None, line: int = 0) -> "StreamFrame":
        return cls("query", (), Query(q, w, mode), line)


def _int_arg(token: str, what: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", lineno) from None
    if value < 1:
        raise ParseError(f"{what} must be >= 1, got {value}", lineno)
    return value


def parse_stream(text: str, mode: str | None = None) -> list[StreamFrame]:
    """Parse the stream format into frames; malformed input raises ParseError."""
    if mode is not None and mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    lines = text.splitlines()
    frames: list[StreamFrame] = []
    pos = 0
    while pos < len(lines):
        lineno = pos + 1
        raw = lines[pos]
        stripped = raw.strip()
        pos += 1
        if not stripped:
            continue
        head = stripped.split()
        if head[0] == "#batch":
            if len(head) != 2:
                raise ParseError("expected '#batch <n>'", lineno)
            n = _int_arg(head[1], "batch size", lineno)
            items = lines[pos : pos + n]
            if len(items) < n:
                raise ParseError(f"batch announces {n} payloads but only {len(items)} follow", lineno)
            frames.append(StreamFrame.of_batch(items, lineno))
            pos += n
        elif head[0] == "?sample":
            if len(head) not in (2, 3):
                raise ParseError("expected '?sample <q> [<w>]'", lineno)
            q = _int_arg(head[1], "q", lineno)
            w = _int_arg(head[2], "w", lineno) if len(head) == 3 else None
            if mode == "sliwin" and w is None:
                raise ParseError("sliding-window queries need a window size", lineno)
            frames.append(StreamFrame.of_query(q, w, mode, lineno))
        elif stripped.startswith("#") and not stripped.startswith("#batch"):
            continue
        else:
            raise ParseError(f"unknown directive {head[0]!r}", lineno)
    return frames


def format_stream(frames: Iterable[StreamFrame]) -> str:
    out = []
    for f in frames:
        if f.kind == "batch":
            out.append(f"#batch {len(f.batch)}")
            out.extend(f.batch)
        else:
            assert f.query is not None
            tail = "" if f.query.w is None else f" {f.query.w}"
            out.append(f"?sample {f.query.q}{tail}")
    return "\n".join(out) + "\n"


def dump_record(record: dict) -> str:
    """One output line; key order is fixed by the record builder."""
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))
