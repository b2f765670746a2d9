"""Command line entry point: ``streamsample {run,verify,bench}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import SamplingError
from .streamfmt import MODES, dump_record, parse_stream


def _config_args(p: argparse.ArgumentParser, mode_required: bool) -> None:
    p.add_argument("--mode", choices=MODES, required=mode_required, default=None if mode_required else "sliwin")
    p.add_argument("--seed", type=int, default=0, help="master seed (64-bit)")
    p.add_argument("--s", type=int, required=True, help="sample size")
    p.add_argument("--max-window", type=int, dest="W", help="largest queryable window W (sliwin)")
    p.add_argument("--window", type=int, dest="w", help="window size w (fixedwin)")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="streamsample", description="Uniform sampling over minibatch streams.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="replay a stream file and answer its queries")
    _config_args(run_p, mode_required=True)
    run_p.add_argument("--test-mode", action="store_true", help="also report ages or stream positions")
    run_p.add_argument("input", nargs="?", default="-", help="stream file ('-' for stdin)")

    ver_p = sub.add_parser("verify", help="run a statistical verification suite")
    ver_p.add_argument("suite", help="suite name, or 'all'")
    ver_p.add_argument("--seed", type=int, default=2026)
    ver_p.add_argument("--scale", type=float, default=1.0, help="multiply trial counts")
    ver_p.add_argument("--workers", type=int, default=1)
    ver_p.add_argument("--json", action="store_true", help="one JSON record per check")
    ver_p.add_argument("--figure-dir", type=Path, help="write a PNG per plottable check here")

    bench_p = sub.add_parser("bench", help="record work/span/store-size counters as CSV")
    _config_args(bench_p, mode_required=True)
    bench_p.add_argument("--generator", default="10000:const:1",
                         help="<count>[:const:K|:geometric:M|:uniform:A-B] (default 10000:const:1)")
    bench_p.add_argument("--output", type=Path, help="CSV path (default stdout)")
    bench_p.add_argument("--figure", type=Path, help="also render the series to this PNG")
    return parser


def _config(args):
    from .runner import RunConfig

    return RunConfig(mode=args.mode, s=args.s, seed=args.seed, W=args.W, w=args.w, workers=args.workers,
                     test_mode=getattr(args, "test_mode", False))


def _cmd_run(args) -> int:
    from .runner import run

    config = _config(args)
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text(encoding="utf-8")
    frames = parse_stream(text, config.mode)
    for record in run(config, frames):
        print(dump_record(record))
    return 0


def _cmd_verify(args) -> int:
    from .. import par_exec
    from .verify import verify

    with par_exec.workers(args.workers):
        checks = verify(args.suite, seed=args.seed, scale=args.scale)
    for c in checks:
        print(json.dumps(c.to_dict()) if args.json else c.line())
    if args.figure_dir:
        from .plotting import plot_checks

        written = plot_checks(checks, args.figure_dir)
        print(f"wrote {len(written)} figures to {args.figure_dir}", file=sys.stderr)
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed", file=sys.stderr)
    return 1 if failed else 0


def _cmd_bench(args) -> int:
    from .bench import GeneratorSpec, bench, to_csv

    config = _config(args)
    rows = bench(config, GeneratorSpec.parse(args.generator))
    out = to_csv(rows)
    if args.output:
        args.output.write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    if args.figure:
        from .plotting import plot_bench

        plot_bench(rows, args.figure, f"{config.mode} s={config.s} {args.generator}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "verify": _cmd_verify, "bench": _cmd_bench}[args.command]
    try:
        return handler(args)
    except SamplingError as exc:
        print(f"streamsample: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"streamsample: error: {exc}", file=sys.stderr)
        return 2
