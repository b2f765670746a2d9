import json

import pytest

from streamsample.errors import InvalidArgument, ParseError, UnknownSuite
from streamsample.harness import RunConfig, StreamFrame, dump_record, format_stream, parse_stream, run
from streamsample.harness.bench import CSV_HEADER, GeneratorSpec, bench, to_csv
from streamsample.harness.cli import main
from streamsample.harness.verify import SUITES, verify
from streamsample.rng import RandomEngine
from streamsample.rr_core import ReservedEntry, ReservedSet
from streamsample.sliwin import SlidingWindowSampler

STREAM = "#batch 3\na\nb\nc\n?sample 2 3\n# note\n#batch 2\nd\ne\n?sample 2 5\n"


class TestParse:
    def test_batch(self):
        assert parse_stream("#batch 2\na\nb\n") == [StreamFrame.of_batch(["a", "b"], 1)]

    def test_query(self):
        (f,) = parse_stream("?sample 2 8\n")
        assert f.kind == "query" and (f.query.q, f.query.w) == (2, 8)

    def test_count_mismatch(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_stream("#batch 3\na\nb\n")

    @pytest.mark.parametrize("text,line", [("?sample x\n", 1), ("#batch 1\na\n!oops\n", 3), ("?sample 2 w\n", 1), ("#batch 0\n", 1)])
    def test_malformed(self, text, line):
        with pytest.raises(ParseError) as err:
            parse_stream(text)
        assert err.value.line == line

    def test_sliwin_needs_window(self):
        with pytest.raises(ParseError):
            parse_stream("?sample 2\n", mode="sliwin")

    def test_roundtrip(self):
        frames = parse_stream(STREAM)
        assert [(f.kind, f.batch, f.query and (f.query.q, f.query.w)) for f in parse_stream(format_stream(frames))] == [
            (f.kind, f.batch, f.query and (f.query.q, f.query.w)) for f in frames
        ]

    def test_payloads_are_opaque(self):
        (f,) = parse_stream("#batch 2\n?sample 1\n#batch 9\n")
        assert f.batch == ("?sample 1", "#batch 9")


class TestRun:
    def test_empty(self):
        assert run(RunConfig("sliwin", 2, W=8), []) == []

    def test_single_batch_permutation(self):
        (rec,) = run(RunConfig("sliwin", 3, W=8), parse_stream("#batch 3\nx\ny\nz\n?sample 3 3\n"))
        assert sorted(rec["sample"]) == ["x", "y", "z"]
        assert "ages" not in rec

    def test_worked_example_hook(self):
        A = ReservedSet(3, 16, [ReservedEntry(a, s, f"x{a}") for a, s in
                                ((1, 2), (2, 3), (3, 1), (7, 1), (10, 3), (11, 3), (14, 2))])
        cfg = RunConfig("sliwin", 3, W=16, test_mode=True)
        smp = SlidingWindowSampler.from_reserved(A, RandomEngine(0))
        (rec,) = run(cfg, parse_stream("?sample 3 16\n"), sampler=smp)
        assert rec["ages"] == [7, 14, 11]

    def test_test_mode_ages(self):
        recs = run(RunConfig("sliwin", 2, W=8, seed=3, test_mode=True), parse_stream(STREAM))
        for rec in recs:
            assert len(set(rec["ages"])) == len(rec["ages"]) and max(rec["ages"]) <= rec["w"]

    def test_prefix_across_q(self):
        text = "#batch 10\n" + "\n".join("abcdefghij") + "\n?sample 3 9\n?sample 2 9\n?sample 1 9\n"
        recs = run(RunConfig("sliwin", 3, W=10, seed=8, test_mode=True), parse_stream(text))
        assert recs[1]["ages"] == recs[0]["ages"][:2] and recs[2]["ages"] == recs[0]["ages"][:1]

    def test_error_record(self):
        (rec,) = run(RunConfig("sliwin", 2, W=8), parse_stream("#batch 3\na\nb\nc\n?sample 2 7\n"))
        assert rec == {"frame": 1, "error": "InvalidQuery", "message": rec["message"]}

    @pytest.mark.parametrize("mode,extra", [("infwin", {}), ("swr", {}), ("fixedwin", {"w": 4})])
    def test_other_modes(self, mode, extra):
        text = "#batch 3\na\nb\nc\n?sample 2\n#batch 4\nd\ne\nf\ng\n?sample 1\n"
        recs = run(RunConfig(mode, 2, seed=1, test_mode=True, **extra), parse_stream(text))
        assert [len(r["sample"]) for r in recs] == [2, 1]
        assert all("positions" in r for r in recs)

    def test_byte_identical_replay(self):
        text = "".join(f"#batch {k}\n" + "".join(f"v{k}_{j}\n" for j in range(k)) + f"?sample 2 {min(12, 2 + k)}\n" for k in range(1, 9))
        outs = set()
        for workers in (1, 2, 8):
            cfg = RunConfig("sliwin", 2, seed=11, W=12, workers=workers, test_mode=True)
            outs.add("\n".join(dump_record(r) for r in run(cfg, parse_stream(text))))
        assert len(outs) == 1

    @pytest.mark.parametrize("kwargs", [dict(mode="nope", s=1), dict(mode="sliwin", s=3, W=2), dict(mode="fixedwin", s=2),
                                        dict(mode="infwin", s=0)])
    def test_bad_config(self, kwargs):
        with pytest.raises(InvalidArgument):
            RunConfig(**kwargs)


class TestBench:
    def test_zero_batches(self):
        rows = bench(RunConfig("sliwin", 2, W=8), GeneratorSpec(0))
        assert to_csv(rows) == ",".join(CSV_HEADER) + "\n"

    @pytest.mark.parametrize("text,expected", [
        ("100", GeneratorSpec(100)),
        ("100:const:4", GeneratorSpec(100, "const", 4)),
        ("100:geometric:2.5", GeneratorSpec(100, "geometric", 2.5)),
        ("100:uniform:2-9", GeneratorSpec(100, "uniform", 2, 9)),
    ])
    def test_parse_spec(self, text, expected):
        assert GeneratorSpec.parse(text) == expected

    @pytest.mark.parametrize("text", ["x", "10:const:0", "10:uniform:5-2", "10:poisson:3", "10:const:1-2"])
    def test_bad_spec(self, text):
        with pytest.raises(InvalidArgument):
            GeneratorSpec.parse(text)

    @pytest.mark.parametrize("text", ["1000:const:7", "1000:geometric:5", "1000:uniform:1-30"])
    def test_sizes_sum(self, text):
        spec = GeneratorSpec.parse(text)
        sizes = list(spec.sizes(RandomEngine(2)))
        assert sum(sizes) == 1000 and min(sizes) >= 1

    def test_infwin_harmonic_bound(self):
        rows = bench(RunConfig("infwin", 16), GeneratorSpec(100_000))
        bound = sum(min(1, 16 / N) for N in range(1, 100_001))
        last = rows[-1]
        assert 0.5 <= last.work / (last.t + bound) <= 2.0
        assert last.store_size == 16

    def test_sliwin_store_size(self):
        import math

        rows = bench(RunConfig("sliwin", 8, W=4096, seed=4), GeneratorSpec(3 * 4096, "const", 64))
        steady = [r.store_size for r in rows[len(rows) // 3:]]
        ratio = sum(steady) / len(steady) / (8 * (1 + math.log(512)))
        assert 0.5 <= ratio <= 2.0

    def test_counters_monotone(self):
        rows = bench(RunConfig("swr", 4), GeneratorSpec(500, "uniform", 1, 20))
        assert all(a.work <= b.work and a.span_proxy <= b.span_proxy for a, b in zip(rows, rows[1:]))
        assert all(r.span_proxy <= r.work for r in rows)


class BrokenEngine(RandomEngine):
    """Top output bit stuck at zero: every unit draw lands below one half."""

    __slots__ = ()

    def next_u64(self):
        return super().next_u64() >> 1


class TestVerify:
    def test_unknown_suite(self):
        with pytest.raises(UnknownSuite):
            verify("nope")

    def test_worked_example(self):
        assert all(c.passed for c in verify("worked-example"))

    def test_skip_cdf_small(self):
        checks = verify("skip-cdf", scale=0.2)
        assert checks and all(c.passed for c in checks)

    @pytest.mark.parametrize("suite", ["skip-cdf", "kappa", "rr-permutation"])
    def test_broken_rng_fails(self, suite):
        checks = verify(suite, scale=0.2, engine_factory=BrokenEngine)
        assert not all(c.passed for c in checks)

    def test_report_fields(self):
        record = verify("kappa", scale=0.1)[0].to_dict()
        assert set(record) == {"suite", "name", "statistic", "threshold", "verdict", "detail"}
        assert record["verdict"] in ("pass", "fail")

    def test_every_suite_runs_small(self):
        for name in SUITES:
            if name in ("swr", "infwin-work"):
                continue  # fixed-size runs; covered by the acceptance tests
            assert verify(name, scale=0.005)


class TestCli:
    def test_run(self, tmp_path, capsys):
        path = tmp_path / "s.txt"
        path.write_text(STREAM)
        assert main(["run", "--mode", "sliwin", "--s", "2", "--max-window", "8", "--test-mode", str(path)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 2 and json.loads(lines[0])["ages"]

    def test_parse_error_exit(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("#batch 2\na\n")
        assert main(["run", "--mode", "infwin", "--s", "2", str(path)]) == 2
        assert "line 1" in capsys.readouterr().err

    def test_bench_csv_and_figure(self, tmp_path):
        out, fig = tmp_path / "b.csv", tmp_path / "b.png"
        assert main(["bench", "--mode", "infwin", "--s", "4", "--generator", "200:const:3",
                     "--output", str(out), "--figure", str(fig)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,work,span_proxy,store_size" and len(lines) == 1 + 67
        assert fig.stat().st_size > 0

    def test_verify_json_and_figures(self, tmp_path, capsys):
        assert main(["verify", "kappa", "--scale", "0.1", "--json", "--figure-dir", str(tmp_path)]) == 0
        recs = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
        assert recs and all(r["verdict"] == "pass" for r in recs)
        assert list(tmp_path.glob("*.png"))

    def test_verify_unknown(self, capsys):
        assert main(["verify", "bogus"]) == 2
