"""Statistical verification suites.

Every suite compares a sampler against an independent oracle (exact PMFs,
brute-force enumeration of windows and permutations, harmonic sums) and
returns :class:`Check` records.  ``scale`` multiplies trial counts; the
acceptance run uses ``scale=1``.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from scipy.stats import chi2_contingency, chisquare

from .. import par_exec
from ..errors import UnknownSuite
from ..fixedwin import BucketPair, InfeasibleCombine
from ..infwin import InfWinSampler, kappa_draw
from ..rng import (
    RandomEngine,
    binomial,
    coin_flip,
    hypergeometric,
    hypergeometric_pmf,
    random_permutation,
    skip_offset,
    static_swor,
    static_swr,
    uniform_int,
)
from ..rr_core import ReservedEntry, ReservedSet, StreamSegment, chi_permutation, fast_rr, fast_single_rr_trace, simple_rr
from ..sliwin import SlidingWindowSampler, construct, sample as store_sample
from ..swr import SwrSampler, replaced_locations

ALPHA = 0.001
SIGMAS = 3.0

EngineFactory = Callable[[int], RandomEngine]

WORKED_EXAMPLE = [(1, 2), (2, 3), (3, 1), (7, 1), (10, 3), (11, 3), (14, 2)]
WORKED_TABLE = [
    [((3,), 3), ((), 3), ((7,), 7), ((), 7)],
    [((1,), 1), ((), 1), ((), 1), ((14,), 14)],
    [((2,), 2), ((), 2), ((10, 11), 11), ((), 11)],
]


@dataclass
class Check:
    suite: str
    name: str
    statistic: float
    threshold: float
    passed: bool
    detail: str = ""
    data: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "verdict": "pass" if self.passed else "fail",
            "detail": self.detail,
        }

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] {self.suite}/{self.name}: statistic={self.statistic:.6g} threshold={self.threshold:.6g} {self.detail}".rstrip()


def _trials(n: int, scale: float) -> int:
    return max(1, int(round(n * scale)))


def chi2_check(suite: str, name: str, counts: Counter, cells: Sequence, probs: Sequence[float] | None = None) -> Check:
    """Goodness of fit of ``counts`` over ``cells`` (uniform unless ``probs`` given)."""
    total = sum(counts.values())
    stray = sum(v for k, v in counts.items() if k not in set(cells))
    observed = [counts.get(c, 0) for c in cells]
    if probs is None:
        probs = [1 / len(cells)] * len(cells)
    expected = [p * total for p in probs]
    if stray:
        return Check(suite, name, 0.0, ALPHA, False, f"{stray} outcomes outside the support")
    pvalue = float(chisquare(observed, expected).pvalue) if len(cells) > 1 else 1.0
    return Check(
        suite, name, pvalue, ALPHA, pvalue >= ALPHA, f"chi-square p over {len(cells)} cells, n={total}",
        data={"labels": [str(c) for c in cells], "observed": observed, "expected": expected},
    )


def sigma_check(suite: str, name: str, hits: dict, trials: int, probs: dict) -> Check:
    """All empirical frequencies within ``SIGMAS`` binomial std-devs of their exact value."""
    worst = 0.0
    worst_key = None
    for key, p in probs.items():
        k = hits.get(key, 0)
        sd = math.sqrt(trials * p * (1 - p))
        dev = abs(k - trials * p)
        z = dev / sd if sd > 0 else (0.0 if dev == 0 else math.inf)
        if z > worst:
            worst, worst_key = z, key
    return Check(suite, name, worst, SIGMAS, worst <= SIGMAS, f"max |z| over {len(probs)} cells (worst {worst_key}), n={trials}")


def _batches(stream: Sequence, pattern: Sequence[int]) -> list:
    out, pos = [], 0
    for k in pattern:
        out.append(stream[pos : pos + k])
        pos += k
    assert pos == len(stream)
    return out


# --- individual suites ------------------------------------------------------

def suite_skip_cdf(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    checks = []
    draws = _trials(100_000, scale)
    kmax = 20
    for i in (1, 2, 5, 10):
        rng = factory(seed).child(4, i)
        values = Counter(skip_offset(rng, i).value for _ in range(draws))
        below = 0
        hits, probs = {}, {}
        for K in range(1, kmax + 1):
            below += values.get(K, 0)
            hits[K] = below
            probs[K] = K / (i + K)
        chk = sigma_check("skip-cdf", f"cdf i={i}", hits, draws, probs)
        chk.data = {"x": list(range(1, kmax + 1)), "empirical": [hits[K] / draws for K in hits], "exact": list(probs.values())}
        checks.append(chk)
        # PMF chi-square on 1..kmax plus a tail cell
        cells = list(range(1, kmax + 1)) + ["tail"]
        pmf = [K / (i + K) - (K - 1) / (i + K - 1) for K in range(1, kmax + 1)]
        pmf.append(1 - kmax / (i + kmax))
        binned = Counter({("tail" if k > kmax else k): v for k, v in values.items() if k <= kmax})
        binned["tail"] = sum(v for k, v in values.items() if k > kmax)
        checks.append(chi2_check("skip-cdf", f"pmf chi-square i={i}", binned, cells, pmf))
    return checks


def suite_rr_permutation(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    n, s = 5, 2
    trials = _trials(200_000, scale)
    X = list(range(1, n + 1))
    cells = list(itertools.permutations(range(1, n + 1), s))
    exact = math.factorial(n - s) / math.factorial(n)
    counts = {}
    for name, algo, tag in (("simple_rr", simple_rr, 1), ("fast_rr", fast_rr, 2)):
        root = factory(seed).child(2, tag)
        counts[name] = Counter(chi_permutation(algo(root.child(r), X, s), s, n) for r in range(trials))
    checks = [
        chi2_check("rr-permutation", f"{name} uniform at 1/{round(1 / exact)}", c, cells) for name, c in counts.items()
    ]
    # cells unseen by both samplers carry no information and break the test
    seen = [c for c in cells if any(counts[name].get(c, 0) for name in counts)]
    table = [[counts[name].get(c, 0) for c in seen] for name in counts]
    pvalue = float(chi2_contingency(table).pvalue) if len(seen) > 1 else 1.0
    checks.append(Check("rr-permutation", "simple_rr vs fast_rr two-sample", pvalue, ALPHA, pvalue >= ALPHA, "chi-square homogeneity p"))
    return checks


def suite_fastrr_marginal(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    n, s = 32, 4
    trials = _trials(300_000, scale)
    X = range(1, n + 1)
    root = factory(seed).child(3)
    hits: Counter = Counter()
    for r in range(trials):
        hits.update((e.age, e.slot) for e in fast_rr(root.child(r), X, s).entries)
    probs = {(j, l): min(1.0, s / j) / s for j in range(1, n + 1) for l in range(1, s + 1)}
    return [sigma_check("fastrr-marginal", "P((j,l) in A) = min(1,s/j)/s", hits, trials, probs)]


def _sliwin_counts(seed: int, factory: EngineFactory, trials: int, W: int, s: int, pattern, windows):
    stream = list(range(1, sum(pattern) + 1))
    batches = _batches(stream, pattern)
    root = factory(seed).child(1)
    counts = {w: Counter() for w in windows}
    for r in range(trials):
        smp = SlidingWindowSampler(s, W, root.child(r))
        for b in batches:
            smp.insert(b)
        for w in windows:
            counts[w][smp.sample(s, w).payloads] += 1
    return stream, counts


def suite_sliwin_uniformity(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    trials = _trials(200_000, scale)
    stream, counts = _sliwin_counts(seed, factory, trials, W=8, s=2, pattern=(3, 2, 3), windows=(4, 6, 8))
    checks = []
    for w, c in counts.items():
        cells = list(itertools.permutations(stream[-w:], 2))
        checks.append(chi2_check("sliwin-uniformity", f"sample(2,{w}) over {len(cells)} ordered pairs", c, cells))
    return checks


def suite_sliwin_small_batches(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    """Minibatches smaller than s, including warm-up, against the permutation oracle."""
    trials = _trials(60_000, scale)
    checks = []
    for pattern in ((1, 1, 1, 1, 1, 1, 1), (2, 1, 2, 2), (1, 2, 1, 2, 1)):
        stream, counts = _sliwin_counts(seed, factory, trials, W=6, s=3, pattern=pattern, windows=(3, 5, 6))
        for w, c in counts.items():
            cells = list(itertools.permutations(stream[-w:], 3))
            checks.append(chi2_check("sliwin-small-batches", f"batches {pattern} sample(3,{w})", c, cells))
    return checks


def suite_store_size(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    W, s, batch = 4096, 8, 64
    runs = _trials(50, scale)
    root = factory(seed).child(5)
    sizes = []
    bin_totals: Counter = Counter()
    snapshots = 0
    for r in range(runs):
        smp = SlidingWindowSampler(s, W, root.child(r))
        for t in range(3 * W // batch):
            smp.insert(range(t * batch, (t + 1) * batch))
            if smp.n_seen >= W:
                sizes.append(smp.store.size())
                snapshots += 1
                for slot, slot_bins in enumerate(smp.store.bins):
                    for k, b in enumerate(slot_bins):
                        bin_totals[slot, k] += len(b)
    target = s * (1 + math.log(W / s))
    ratio = (sum(sizes) / len(sizes)) / target
    worst_bin = max(v / snapshots for v in bin_totals.values())
    checks = [
        Check("store-size", "mean stored entries / s(1+ln(W/s))", ratio, 2.0, 0.5 <= ratio <= 2.0,
              f"mean {sum(sizes) / len(sizes):.2f} vs {target:.2f}; allowed [0.5, 2.0]",
              data={"x": list(range(len(sizes[: 3 * W // batch]))), "empirical": sizes[: 3 * W // batch], "exact": [target] * len(sizes[: 3 * W // batch])}),
        Check("store-size", "max long-run mean bin size", worst_bin, 1.25, worst_bin <= 1.25, f"over {len(bin_totals)} (slot, bin) pairs"),
    ]
    n = 1024
    reps = _trials(20_000, scale)
    seg = StreamSegment(range(n))
    iter_root = factory(seed).child(6)
    iters = [fast_single_rr_trace(iter_root.child(r), seg).iterations for r in range(reps)]
    mean = sum(iters) / reps
    log_target = 1 + math.log(n)
    rel = abs(mean - log_target) / log_target
    checks.append(Check("store-size", "FastSingleRR mean iterations vs 1+ln n", rel, 0.10, rel <= 0.10,
                        f"mean {mean:.3f} vs {log_target:.3f}"))
    harmonic = sum(1 / i for i in range(1, n + 1))
    var = sum((1 / i) * (1 - 1 / i) for i in range(2, n + 1))
    z = abs(mean - harmonic) / math.sqrt(var / reps)
    checks.append(Check("store-size", "FastSingleRR mean iterations vs harmonic H_n", z, SIGMAS, z <= SIGMAS,
                        f"mean {mean:.4f} vs H_n {harmonic:.4f}"))
    return checks


INFWIN_PATTERNS = ((12,), (4, 4, 4), (1,) * 12)


def suite_infwin_uniformity(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    trials = _trials(200_000, scale)
    checks = []
    stream = list(range(1, 13))
    for s in (2, 3):
        for pattern in INFWIN_PATTERNS:
            batches = _batches(stream, pattern)
            root = factory(seed).child(7, s, len(pattern))
            hits: Counter = Counter()
            for r in range(trials):
                smp = InfWinSampler(s, root.child(r))
                for b in batches:
                    smp.insert(b)
                got = smp.current_sample()
                assert len(set(got)) == len(got) == s
                hits.update(got)
            probs = {p: s / len(stream) for p in stream}
            label = "x".join(map(str, pattern)) if len(set(pattern)) > 1 else f"{pattern[0]}x{len(pattern)}"
            checks.append(sigma_check("infwin-uniformity", f"s={s} batches {label}", hits, trials, probs))
    return checks


def infwin_work_ratio(engine: RandomEngine, s: int, sizes: Iterable[int]) -> float:
    smp = InfWinSampler(s, engine)
    bound = 0.0
    N = 0
    t = 0
    for n in sizes:
        N += n
        t += 1
        smp.insert(range(N - n, N))
        bound += min(n, s * n / N)
    return smp.work_counter / (t + bound)


def suite_infwin_work(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    N, s = _trials(100_000, scale), 16
    runs = 3
    root = factory(seed).child(8)
    ratios = [infwin_work_ratio(root.child(r), s, [1] * N) for r in range(runs)]
    mean = sum(ratios) / runs
    return [Check("infwin-work", f"slot writes / (t + sum min(n_i, s n_i/N_i)), N={N}, s={s}", mean, 2.0,
                  0.5 <= mean <= 2.0, f"mean over {runs} runs; allowed [0.5, 2.0]")]


def suite_kappa(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    draws = _trials(100_000, scale)
    rng = factory(seed).child(9)
    values = [kappa_draw(rng, 2, 3, 6) for _ in range(draws)]
    pmf = hypergeometric_pmf(2, 3, 6)
    checks = [chi2_check("kappa", "H(2,3,6) vs (0.2,0.6,0.2)", Counter(values), list(pmf), list(pmf.values()))]
    mean = sum(values) / draws
    checks.append(Check("kappa", "mean H(2,3,6) vs pq/r = 1", abs(mean - 1.0), 0.02, abs(mean - 1.0) <= 0.02, f"mean {mean:.4f}"))
    return checks


def _fixedwin_runs(w: int):
    """(pattern label, batch sizes, query times) covering every t in [w, 2w+2]."""
    T = 2 * w + 2
    runs = [("1x", [1] * T, list(range(w, T + 1)))]
    evens = [2] * (T // 2)
    odds = [1] + [2] * ((T - 1) // 2)
    runs.append(("2,2,..", evens, [t for t in range(w, T + 1) if t % 2 == 0]))
    runs.append(("2,2,..", odds, [t for t in range(w, T + 1) if t % 2 == 1]))
    for t in range(w, T + 1):
        runs.append(("w,rest", [w] + ([t - w] if t > w else []), [t]))
    return runs


def suite_fixedwin(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    trials = _trials(200_000, scale)
    checks = []
    infeasible = 0
    max_active = 0
    for w, s in ((4, 2), (6, 3)):
        runs = _fixedwin_runs(w)
        counts: dict = {}
        root = factory(seed).child(10, w)
        for r in range(trials):
            trial = root.child(r)
            for run_idx, (label, sizes, times) in enumerate(runs):
                bp = BucketPair(w, s, trial.child(run_idx, 0))
                N = 0
                want = set(times)
                for n in sizes:
                    bp.insert(range(N + 1, N + n + 1))
                    N += n
                    max_active = max(max_active, bp.active_buckets)
                    if N in want:
                        try:
                            got = bp.sample(trial.child(run_idx, 1, N)).payloads
                        except InfeasibleCombine:
                            infeasible += 1
                            continue
                        counts.setdefault((label, N), Counter())[frozenset(got)] += 1
        for (label, t), c in sorted(counts.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            window = range(max(1, t - w + 1), t + 1)
            cells = [frozenset(x) for x in itertools.combinations(window, min(s, len(window)))]
            checks.append(chi2_check("fixedwin", f"w={w} s={s} t={t} batches {label}", c, cells))
    checks.append(Check("fixedwin", "feasibility s - s' <= |newsmp|", infeasible, 0, infeasible == 0, "violations"))
    checks.append(Check("fixedwin", "active buckets <= 2", max_active, 2, max_active <= 2, "max observed"))
    return checks


def suite_swr(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    trials = _trials(200_000, scale)
    checks = []
    root = factory(seed).child(11)
    # marginals at N=4 from batches (1, 2, 1)
    marg = [Counter(), Counter()]
    for r in range(trials):
        smp = SwrSampler(2, root.child(0, r))
        for b in ([1], [2, 3], [4]):
            smp.insert(b)
        for k, v in enumerate(smp.current_sample()):
            marg[k][v] += 1
    for k in range(2):
        checks.append(chi2_check("swr", f"coordinate {k + 1} uniform over N=4", marg[k], [1, 2, 3, 4]))
    joint = Counter()
    for r in range(trials):
        smp = SwrSampler(2, root.child(1, r))
        smp.insert([1])
        smp.insert([2, 3])
        joint[tuple(smp.current_sample())] += 1
    checks.append(chi2_check("swr", "coordinates (1,2) jointly uniform over N^2=9", joint, list(itertools.product([1, 2, 3], repeat=2))))
    # location-set law: binomial split vs independent per-slot coins
    # total variation has a noise floor of roughly 1/sqrt(reps), so this
    # sample size is fixed rather than scaled
    s = 3
    reps = 500_000
    for n, N in ((1, 3), (1, 2)):
        p = n / N
        rng = root.child(2, N)
        law = Counter(frozenset(replaced_locations(rng.child(r), s, n, N)) for r in range(reps))
        tv = 0.0
        for size in range(s + 1):
            for subset in itertools.combinations(range(1, s + 1), size):
                exact = p ** size * (1 - p) ** (s - size)
                tv += abs(law.get(frozenset(subset), 0) / reps - exact)
        tv /= 2
        checks.append(Check("swr", f"location set vs independent Bernoulli({n}/{N}) at s={s}", tv, 0.005, tv < 0.005,
                            f"total variation, n={reps}"))
    return checks


def _determinism_trace(seed: int) -> str:
    """Exercise every public operation once; returns a canonical text trace."""
    root = RandomEngine(seed)
    e = root.child(0)
    out: dict = {
        "uniform_int": [uniform_int(e, 1, 6) for _ in range(5)],
        "coin_flip": [coin_flip(e, 0.3) for _ in range(5)],
        "perm": random_permutation(e, 6),
        "skip": [skip_offset(e, i).value for i in (1, 5, 50)],
        "hyper": [hypergeometric(e, 4, 7, 12) for _ in range(3)],
        "binom": [binomial(e, 8, 0.4) for _ in range(3)],
        "swor": static_swor(e, 4, 100),
        "swr": static_swr(e, 4, 9),
    }
    X = list(range(200))
    out["simple_rr"] = sorted(simple_rr(root.child(1), X[:40], 3).pairs())
    out["fast_rr"] = sorted(fast_rr(root.child(2), X, 8).pairs())
    rs = fast_rr(root.child(3), X, 4)
    store = construct(rs, len(X), 4)
    out["construct"] = store.table()
    out["sample"] = store_sample(store, 4, 150).ages
    smp = SlidingWindowSampler(4, 64, root.child(4))
    for b in (X[:10], X[10:11], X[11:90], X[90:93]):
        smp.insert(b)
    out["insert"] = smp.store.table()
    out["sliwin_sample"] = smp.sample(3, 40).ages
    inf = InfWinSampler(5, root.child(5))
    for b in (X[:3], X[3:9], X[9:120]):
        inf.insert(b)
    out["infwin"] = [inf.current_sample(), inf.work_counter]
    bp = BucketPair(10, 3, root.child(6))
    for b in (X[:7], X[7:8], X[8:33]):
        bp.insert(b)
    out["fixedwin"] = list(bp.sample(root.child(7)).payloads)
    sw = SwrSampler(4, root.child(8))
    for b in (X[:2], X[2:30]):
        sw.insert(b)
    out["swr_sampler"] = sw.current_sample()
    from .runner import RunConfig, run
    from .streamfmt import StreamFrame

    frames = [StreamFrame.of_batch([str(v) for v in X[:20]]), StreamFrame.of_query(3, 12), StreamFrame.of_batch(["a", "b"]), StreamFrame.of_query(2, 5)]
    out["run"] = run(RunConfig("sliwin", 3, seed=seed, W=16, test_mode=True), frames)
    return json.dumps(out, sort_keys=True, default=str)


def suite_determinism(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    seeds = [seed * 1000 + k for k in range(_trials(20, scale))]
    mismatches = []
    for sd in seeds:
        traces = {}
        for n in (1, 2, 8):
            with par_exec.workers(n):
                traces[n] = _determinism_trace(sd)
        if len(set(traces.values())) != 1:
            mismatches.append(sd)
    return [Check("determinism", "identical output for workers 1, 2, 8", len(mismatches), 0, not mismatches,
                  f"{len(seeds)} seeds; mismatching: {mismatches[:5]}")]


def worked_example_store():
    A = ReservedSet(3, 16, [ReservedEntry(age, slot, f"x{age}") for age, slot in WORKED_EXAMPLE])
    return construct(A, 16, 3)


def suite_worked_example(seed: int, factory: EngineFactory, scale: float) -> list[Check]:
    store = worked_example_store()
    table_ok = store.table() == WORKED_TABLE
    checks = [Check("worked-example", "bin/phi table", float(table_ok), 1, table_ok, str(store.table()) if not table_ok else "")]
    for w, want in ((16, (7, 14, 11)), (8, (7, 1, 2))):
        got = store_sample(store, 3, w).ages
        checks.append(Check("worked-example", f"sample(3,{w}) -> {want}", float(got == want), 1, got == want, f"got {got}"))
    return checks


SUITES: dict[str, Callable[[int, EngineFactory, float], list[Check]]] = {
    "sliwin-uniformity": suite_sliwin_uniformity,
    "rr-permutation": suite_rr_permutation,
    "fastrr-marginal": suite_fastrr_marginal,
    "skip-cdf": suite_skip_cdf,
    "store-size": suite_store_size,
    "infwin-uniformity": suite_infwin_uniformity,
    "infwin-work": suite_infwin_work,
    "kappa": suite_kappa,
    "fixedwin": suite_fixedwin,
    "swr": suite_swr,
    "determinism": suite_determinism,
    "worked-example": suite_worked_example,
    "sliwin-small-batches": suite_sliwin_small_batches,
}


def verify(suite_name: str, seed: int = 2026, scale: float = 1.0, engine_factory: EngineFactory = RandomEngine) -> list[Check]:
    """Run one suite (or ``"all"``) and return its checks."""
    if suite_name == "all":
        return [c for name in SUITES for c in verify(name, seed, scale, engine_factory)]
    try:
        suite = SUITES[suite_name]
    except KeyError:
        raise UnknownSuite(f"unknown suite {suite_name!r}; known: {', '.join(SUITES)}") from None
    return suite(seed, engine_factory, scale)
