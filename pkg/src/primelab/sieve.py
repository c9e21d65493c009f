"""Exact arithmetic ground truth.

Segmented sieving over half-open windows, prime-counting and Chebyshev
summatory functions (pi, theta, psi), von Mangoldt values, the logarithmic
integral, a sums-of-two-squares indicator, and reduced-residue streams.

Everything here is exact (or, for real accumulations, compensated 64-bit):
this module is the oracle the analytic predictions elsewhere are tested
against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.integrate import quad

from .util import CapacityError, DomainError, KahanSum

DEFAULT_SEGMENT_SIZE = 1 << 22  # cache-resident bitmaps
DEFAULT_MAX_SPAN = 1 << 27  # one materialized window; larger ranges must stream

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# grow-only prime cache shared by every caller
_cache_primes = np.empty(0, dtype=np.int64)
_cache_limit = 1


@dataclass(frozen=True)
class PrimeSegment:
    """Primality bitmap over the half-open window [lo, hi)."""

    lo: int
    hi: int
    bits: np.ndarray

    def primes(self) -> np.ndarray:
        return self.lo + np.flatnonzero(self.bits)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def is_prime(self, n: int) -> bool:
        if not self.lo <= n < self.hi:
            raise DomainError(f"{n} outside window [{self.lo}, {self.hi})")
        return bool(self.bits[n - self.lo])


def _simple_sieve_bits(n: int) -> np.ndarray:
    """Plain Eratosthenes bitmap for 0..n inclusive (small n only)."""
    bits = np.ones(n + 1, dtype=bool)
    bits[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if bits[p]:
            bits[p * p :: p] = False
    return bits


def primes_upto(n: int) -> np.ndarray:
    """Ascending primes <= n, served from a grow-only cache (read-only view)."""
    global _cache_primes, _cache_limit
    n = int(n)
    if n < 2:
        return _cache_primes[:0]
    if n > _cache_limit:
        target = max(n, 2 * _cache_limit, 1 << 16)
        if target <= (1 << 24):
            primes = np.flatnonzero(_simple_sieve_bits(target)).astype(np.int64)
        else:
            chunks = [seg.primes() for seg in iter_segments(0, target + 1)]
            primes = np.concatenate(chunks)
        primes.setflags(write=False)
        _cache_primes = primes
        _cache_limit = target
    idx = int(np.searchsorted(_cache_primes, n, side="right"))
    return _cache_primes[:idx]


def sieve_range(lo: int, hi: int, max_span: int = DEFAULT_MAX_SPAN) -> PrimeSegment:
    """Exact primality bitmap over [lo, hi); independent of segmentation."""
    lo, hi = int(lo), int(hi)
    if not 0 <= lo < hi:
        raise DomainError(f"need 0 <= lo < hi, got [{lo}, {hi})")
    if hi > (1 << 63) - 1:
        raise DomainError("windows beyond 2^63 - 1 are unsupported")
    if hi - lo > max_span:
        raise CapacityError(
            f"window of {hi - lo} integers exceeds the {max_span}-integer budget; "
            "stream with iter_segments instead"
        )
    bits = np.ones(hi - lo, dtype=bool)
    for p in primes_upto(math.isqrt(hi - 1)).tolist():
        # start at max(p*p, first multiple >= lo): smaller composites in the
        # window are crossed off by a smaller prime factor
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start < hi:
            bits[start - lo :: p] = False
    for n in (0, 1):
        if lo <= n < hi:
            bits[n - lo] = False
    return PrimeSegment(lo, hi, bits)


def iter_segments(
    lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT_SIZE
) -> Iterator[PrimeSegment]:
    """Stream [lo, hi) as consecutive PrimeSegments of at most segment_size."""
    lo, hi = int(lo), int(hi)
    if not 0 <= lo < hi:
        raise DomainError(f"need 0 <= lo < hi, got [{lo}, {hi})")
    cur = lo
    while cur < hi:
        nxt = min(hi, cur + segment_size)
        yield sieve_range(cur, nxt, max_span=segment_size)
        cur = nxt


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 2^64."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _distinct_prime_factors(n: int) -> list[int]:
    """Distinct prime factors by trial division (small-factor friendly)."""
    n = int(n)
    if n < 1:
        raise DomainError("factorization needs n >= 1")
    out = []
    for p in primes_upto(min(math.isqrt(n) + 1, 10**6)).tolist():
        if p * p > n:
            break
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
    if n > 1:
        if n < (1 << 64) and not is_prime(n):
            raise DomainError(f"cofactor {n} is composite beyond the trial-division bound")
        out.append(n)
    return out


def von_mangoldt(n: int) -> float:
    """log p when n = p^k, else 0."""
    n = int(n)
    if n < 1:
        raise DomainError("von Mangoldt needs n >= 1")
    if n == 1:
        return 0.0
    fac = _distinct_prime_factors(n)
    if len(fac) != 1:
        return 0.0
    p = fac[0]
    m = n
    while m % p == 0:
        m //= p
    return math.log(p) if m == 1 else 0.0


def von_mangoldt_range(lo: int, hi: int) -> np.ndarray:
    """Array of Lambda(n) for n in [lo, hi)."""
    seg = sieve_range(lo, hi)
    out = np.zeros(hi - lo, dtype=np.float64)
    pr = seg.primes()
    if pr.size:
        out[pr - lo] = np.log(pr.astype(np.float64))
    for p in primes_upto(math.isqrt(max(hi - 1, 0))).tolist():
        lg = math.log(p)
        pk = p * p
        while pk < hi:
            if pk >= lo:
                out[pk - lo] = lg
            pk *= p
    return out


@dataclass(frozen=True)
class SummatorySnapshot:
    """pi, theta, psi at a single point x (natural logs)."""

    x: int
    pi_x: int
    theta_x: float
    psi_x: float


def _prime_power_table(x_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted prime powers p^k <= x_max with k >= 2, and cumulative log p."""
    vals: list[int] = []
    logs: list[float] = []
    for p in primes_upto(math.isqrt(x_max)).tolist():
        lg = math.log(p)
        pk = p * p
        while pk <= x_max:
            vals.append(pk)
            logs.append(lg)
            pk *= p
    order = np.argsort(np.asarray(vals, dtype=np.int64), kind="stable")
    v = np.asarray(vals, dtype=np.int64)[order]
    c = np.cumsum(np.asarray(logs, dtype=np.float64)[order])
    return v, c


def summatory_many(xs: Sequence[int]) -> list[SummatorySnapshot]:
    """Exact snapshots at several points from one streamed sieve pass."""
    pts = sorted({int(x) for x in xs})
    if not pts:
        return []
    if pts[0] < 0:
        raise DomainError("summatory needs x >= 0")
    x_max = pts[-1]
    snaps: dict[int, SummatorySnapshot] = {}
    pending = list(pts)
    ppow_vals, ppow_cum = _prime_power_table(max(x_max, 4))

    def psi_extra(x: int) -> float:
        i = int(np.searchsorted(ppow_vals, x, side="right"))
        return float(ppow_cum[i - 1]) if i else 0.0

    theta = KahanSum()
    pi_run = 0
    if x_max < 2:
        for x in pts:
            snaps[x] = SummatorySnapshot(x, 0, 0.0, 0.0)
        return [snaps[int(x)] for x in xs]

    for seg in iter_segments(0, x_max + 1):
        pr = seg.primes()
        lg = np.log(pr.astype(np.float64)) if pr.size else np.empty(0)
        while pending and pending[0] < seg.hi:
            x = pending.pop(0)
            idx = int(np.searchsorted(pr, x, side="right"))
            theta_x = theta.value + float(np.sum(lg[:idx]))
            snaps[x] = SummatorySnapshot(
                x, pi_run + idx, theta_x, theta_x + psi_extra(x)
            )
        theta.add(float(np.sum(lg)))
        pi_run += int(pr.size)
    return [snaps[int(x)] for x in xs]


def summatory(x: int) -> SummatorySnapshot:
    """Exact pi(x), theta(x), psi(x) via streamed sieving."""
    return summatory_many([x])[0]


def prime_pi(x: int) -> int:
    """Exact count of primes <= x."""
    x = int(x)
    if x < 2:
        return 0
    count = 0
    for seg in iter_segments(0, x + 1):
        count += seg.count
    return count


def _li_anchor() -> float:
    """li(2) from the classical series gamma + ln ln x + sum (ln x)^k / (k k!)."""
    u = math.log(2.0)
    total = float(np.euler_gamma) + math.log(u)
    term = 1.0
    for k in range(1, 40):
        term *= u / k
        total += term / k
    return total


LI_AT_2 = _li_anchor()


def log_integral(x: float) -> float:
    """li(x) = li(2) + integral_2^x dt/log t, adaptive quadrature."""
    x = float(x)
    if x < 2.0:
        raise DomainError("log_integral needs x >= 2")
    if x == 2.0:
        return LI_AT_2
    val, _err = quad(lambda t: 1.0 / math.log(t), 2.0, x, epsabs=0.0, epsrel=1e-13, limit=200)
    return LI_AT_2 + val


def two_squares_indicator(n: int) -> bool:
    """True iff n = a^2 + b^2: every prime factor = 3 mod 4 occurs to an even power."""
    n = int(n)
    if n < 0:
        raise DomainError("two_squares_indicator needs n >= 0")
    if n == 0:
        return True
    for p in _distinct_prime_factors(n):
        if p % 4 == 3:
            e = 0
            m = n
            while m % p == 0:
                m //= p
                e += 1
            if e % 2:
                return False
    return True


def two_squares_range(n_max: int) -> np.ndarray:
    """Indicator array for 0..n_max: n is a sum of two squares iff no prime
    p = 3 mod 4 divides n to an odd power.

    For each such p and each odd k, the n with v_p(n) = k are the multiples
    of p^k that are not multiples of p^(k+1); marking those never collides
    across primes.
    """
    n_max = int(n_max)
    if n_max < 0:
        raise DomainError("two_squares_range needs n_max >= 0")
    bad = np.zeros(n_max + 1, dtype=bool)
    for p in primes_upto(n_max).tolist():
        if p % 4 != 3:
            continue
        pk = p
        while pk <= n_max:
            m = np.arange(pk, n_max + 1, pk, dtype=np.int64)
            bad[m[(m // pk) % p != 0]] = True
            pk *= p * p
    return ~bad


def reduced_residues(q: int, limit: int) -> Iterator[int]:
    """Ascending stream of n <= limit with gcd(n, q) = 1."""
    q, limit = int(q), int(limit)
    if q < 1 or limit < 1:
        raise DomainError("reduced_residues needs q >= 1 and limit >= 1")
    fac = _distinct_prime_factors(q) if q > 1 else []
    block = 1 << 20
    lo = 1
    while lo <= limit:
        hi = min(limit + 1, lo + block)
        ok = np.ones(hi - lo, dtype=bool)
        for p in fac:
            start = ((lo + p - 1) // p) * p
            if start < hi:
                ok[start - lo :: p] = False
        for n in (lo + np.flatnonzero(ok)).tolist():
            yield int(n)
        lo = hi


def euler_phi(q: int) -> int:
    """Euler totient via the distinct prime factors of q."""
    q = int(q)
    if q < 1:
        raise DomainError("euler_phi needs q >= 1")
    out = q
    for p in _distinct_prime_factors(q) if q > 1 else []:
        out = out // p * (p - 1)
    return out
