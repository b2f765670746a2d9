"""Splittable, counter-based randomness and the discrete distributions the
samplers consume.

Every :class:`RandomEngine` is identified by a 64-bit master seed and a path of
integers.  The path is hashed into a 64-bit key and outputs are produced by the
SplitMix64 finalizer applied to ``key + counter * GOLDEN``, so the output
sequence is a pure function of ``(master_seed, path)``.  Parallel tasks never
share an engine; each derives its own with :meth:`RandomEngine.child`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidArgument, InvalidProbability, InvalidRange

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_PATH_SALT = 0xD1B54A32D192ED03
_UNIT_BITS = 54
_UNIT_DENOM = 1 << _UNIT_BITS


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _step_key(key: int, idx: int) -> int:
    return _mix64((key + _mix64(((idx & MASK64) * GOLDEN + _PATH_SALT) & MASK64)) & MASK64)


def derive_key(master_seed: int, path: tuple[int, ...]) -> int:
    key = _mix64((master_seed & MASK64) ^ _PATH_SALT)
    for idx in path:
        key = _step_key(key, idx)
    return key


class RandomEngine:
    """Deterministic random source addressed by ``(master_seed, path)``.

    Not safe to share between concurrent tasks; derive a child per task.
    """

    __slots__ = ("master_seed", "path", "_key", "_ctr")

    def __init__(self, master_seed: int, path: tuple[int, ...] = ()):
        self.master_seed = int(master_seed) & MASK64
        self.path = tuple(int(p) for p in path)
        self._key = derive_key(self.master_seed, self.path)
        self._ctr = 0

    def __repr__(self) -> str:
        return f"RandomEngine(seed={self.master_seed}, path={self.path}, drawn={self._ctr})"

    def child(self, *idx: int) -> "RandomEngine":
        """Engine for the substream ``path + idx``; independent of this engine's position."""
        other = type(self).__new__(type(self))
        other.master_seed = self.master_seed
        other.path = self.path + idx
        key = self._key
        for i in idx:
            key = _step_key(key, i)
        other._key = key
        other._ctr = 0
        return other

    def clone(self) -> "RandomEngine":
        other = type(self).__new__(type(self))
        other.master_seed = self.master_seed
        other.path = self.path
        other._key = self._key
        other._ctr = self._ctr
        return other

    def next_u64(self) -> int:
        self._ctr += 1
        return _mix64((self._key + self._ctr * GOLDEN) & MASK64)

    def unit_numerator(self) -> int:
        """Odd integer ``m`` in ``[1, 2**54)``; ``m / 2**54`` is uniform on the open unit interval."""
        return ((self.next_u64() >> (64 - _UNIT_BITS + 1)) << 1) | 1

    def random(self) -> float:
        return self.unit_numerator() / _UNIT_DENOM

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by bitmask rejection (exact for any ``n >= 1``)."""
        if n == 1:
            return 0
        nbits = (n - 1).bit_length()
        while True:
            x = 0
            got = 0
            while got < nbits:
                x = (x << 64) | self.next_u64()
                got += 64
            x >>= got - nbits
            if x < n:
                return x


@dataclass(frozen=True)
class SkipOffset:
    value: int

    def __post_init__(self):
        if self.value < 1:
            raise InvalidArgument(f"skip offset must be >= 1, got {self.value}")

    def __int__(self) -> int:
        return self.value


def uniform_int(engine: RandomEngine, a: int, b: int) -> int:
    if a > b:
        raise InvalidRange(f"empty range [{a}, {b}]")
    return a + engine.below(b - a + 1)


def coin_flip(engine: RandomEngine, p: float) -> bool:
    """Return True (heads) with probability ``p``, for ``0 < p <= 1``."""
    if not 0 < p <= 1:
        raise InvalidProbability(f"coin probability must lie in (0, 1], got {p}")
    return engine.random() < p


def coin_flip_ratio(engine: RandomEngine, num: int, den: int) -> bool:
    """Heads with probability exactly ``num/den`` (no floating point)."""
    if not 0 < num <= den:
        raise InvalidProbability(f"coin probability must lie in (0, 1], got {num}/{den}")
    return engine.unit_numerator() * den < num * _UNIT_DENOM


def random_permutation(engine: RandomEngine, s: int) -> list[int]:
    """Uniform permutation of ``1..s``."""
    if s < 1:
        raise InvalidArgument(f"permutation size must be >= 1, got {s}")
    return static_swor(engine, s, s)


def _skip_from_ratio(i: int, num: int, den: int) -> int:
    # smallest k with k/(i+k) >= num/den, i.e. k = ceil(num*i / (den-num))
    k = -((-num * i) // (den - num))
    return max(k, 1)


def skip_inverse_cdf(i: int, u: float | Fraction) -> int:
    """Inverse of ``P(Skip(i) <= k) = k/(i+k)`` evaluated at ``u`` in (0, 1)."""
    if i < 1:
        raise InvalidArgument(f"skip needs i >= 1, got {i}")
    f = Fraction(u)
    if not 0 < f < 1:
        raise InvalidProbability(f"u must lie in (0, 1), got {u}")
    return _skip_from_ratio(i, f.numerator, f.denominator)


def skip_offset(engine: RandomEngine, i: int) -> SkipOffset:
    """Gap from age ``i`` to the next age picked by a single-slot reversed reservoir."""
    if i < 1:
        raise InvalidArgument(f"skip needs i >= 1, got {i}")
    return SkipOffset(_skip_from_ratio(i, engine.unit_numerator(), _UNIT_DENOM))


def _lchoose(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _invert(engine: RandomEngine, lo: int, logpmf: list[float]) -> int:
    top = max(logpmf)
    weights = [math.exp(v - top) for v in logpmf]
    target = engine.random() * math.fsum(weights)
    acc = 0.0
    for offset, wgt in enumerate(weights):
        acc += wgt
        if target < acc:
            return lo + offset
    return lo + len(weights) - 1


def hypergeometric_pmf(p: int, q: int, r: int) -> dict[int, float]:
    """Exact PMF of the number of type-1 balls in ``p`` draws from ``q`` type-1 among ``r``."""
    lo, hi = max(0, p + q - r), min(p, q)
    return {k: math.comb(q, k) * math.comb(r - q, p - k) / math.comb(r, p) for k in range(lo, hi + 1)}


def hypergeometric(engine: RandomEngine, p: int, q: int, r: int) -> int:
    """Draw from H(p, q, r) by inversion over the log-space PMF."""
    if min(p, q, r) < 0 or p > r or q > r:
        raise InvalidArgument(f"hypergeometric needs 0 <= p, q <= r, got ({p}, {q}, {r})")
    lo, hi = max(0, p + q - r), min(p, q)
    if lo == hi:
        return lo
    base = _lchoose(r, p)
    logpmf = [_lchoose(q, k) + _lchoose(r - q, p - k) - base for k in range(lo, hi + 1)]
    return _invert(engine, lo, logpmf)


def binomial(engine: RandomEngine, n: int, p: float) -> int:
    """Draw from B(n, p) by inversion over the log-space PMF."""
    if n < 0:
        raise InvalidArgument(f"binomial needs n >= 0, got {n}")
    if not 0 <= p <= 1:
        raise InvalidProbability(f"binomial needs 0 <= p <= 1, got {p}")
    if p == 0 or n == 0:
        return 0
    if p == 1:
        return n
    lp, lq = math.log(p), math.log1p(-p)
    logpmf = [_lchoose(n, k) + k * lp + (n - k) * lq for k in range(n + 1)]
    return _invert(engine, 0, logpmf)


def static_swor(engine: RandomEngine, s: int, n: int) -> list[int]:
    """Uniform ``s``-permutation of ``1..n`` in O(s) time (sparse Fisher-Yates).

    ``s == 0`` yields an empty list; callers use it for empty hypergeometric draws.
    """
    if s < 0 or n < 0 or s > n:
        raise InvalidArgument(f"cannot draw {s} distinct values from [1, {n}]")
    displaced: dict[int, int] = {}
    out = []
    for j in range(s):
        r = j + engine.below(n - j)
        vr = displaced.get(r, r)
        displaced[r] = displaced.get(j, j)
        out.append(vr + 1)
    return out


def static_swr(engine: RandomEngine, s: int, n: int) -> list[int]:
    if n < 1:
        raise InvalidArgument(f"cannot draw from an empty range [1, {n}]")
    if s < 0:
        raise InvalidArgument(f"sample size must be >= 0, got {s}")
    return [1 + engine.below(n) for _ in range(s)]
