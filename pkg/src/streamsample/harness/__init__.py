"""Stream replay, statistical verification and benchmarking."""

from .runner import RunConfig, run
from .streamfmt import StreamFrame, dump_record, format_stream, parse_stream

__all__ = ["RunConfig", "StreamFrame", "dump_record", "format_stream", "parse_stream", "run"]
