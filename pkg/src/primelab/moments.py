"""Tuple counts and the variance / higher-moment program for psi windows.

Exact sieve-side quantities: counts of n <= x with n + h_i all prime, the
Lambda-weighted analogues, and sliding-window sums of Lambda over (n, n+h].
Analytic side: the corrected variance h(log(N/h) + B - 1), Gaussian moments
for even order, and the centered singular-series sums over distinct tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.integrate import quad

from .singular import (
    B_CONSTANT,
    BULK_CUTOFF,
    SingularValue,
    TupleSet,
    pair_singular_upto,
    pattern_singular,
    singular_series,
)
from .sieve import iter_segments, sieve_range, von_mangoldt_range
from .util import CapacityError, DomainError, KahanSum

_BLOCK = 1 << 22


def _double_factorial(n: int) -> float:
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out


def tuple_count(H: TupleSet, x: int) -> int:
    """Exact #{1 <= n <= x : n + h prime for every offset h}."""
    x = int(x)
    if x < 1:
        raise DomainError("need x >= 1")
    if H.k == 0:
        return x
    offs = H.offsets
    span = offs[-1]
    total = 0
    lo = 1
    while lo <= x:
        hi = min(x + 1, lo + _BLOCK)
        seg = sieve_range(lo, hi + span)
        width = hi - lo
        mask = seg.bits[offs[0] : offs[0] + width].copy()
        for h in offs[1:]:
            mask &= seg.bits[h : h + width]
        total += int(np.count_nonzero(mask))
        lo = hi
    return total


def lambda_tuple_sum(H: TupleSet, x: int) -> float:
    """sum_{n <= x} Lambda(n + h_1) ... Lambda(n + h_k), exactly accumulated."""
    x = int(x)
    if x < 1:
        raise DomainError("need x >= 1")
    if H.k == 0:
        return float(x)
    offs = H.offsets
    span = offs[-1]
    acc = KahanSum()
    lo = 1
    while lo <= x:
        hi = min(x + 1, lo + _BLOCK)
        lam = von_mangoldt_range(lo, hi + span)
        width = hi - lo
        prod = lam[offs[0] : offs[0] + width].copy()
        for h in offs[1:]:
            prod *= lam[h : h + width]
        acc.add(float(np.sum(prod)))
        lo = hi
    return acc.value


@dataclass(frozen=True)
class TuplePrediction:
    """Conjectured counts: the literal S * x / (log x)^k and the
    integral-refined S * integral_2^x dt/(log t)^k."""

    literal: float
    integral: float
    vanishes: bool
    singular: SingularValue


def tuple_count_prediction(
    H: TupleSet, x: int, prime_cutoff: int = 10**6
) -> TuplePrediction:
    x = int(x)
    if x < 3:
        raise DomainError("need x >= 3")
    sv = singular_series(H, prime_cutoff)
    k = H.k
    if sv.vanishes:
        return TuplePrediction(0.0, 0.0, True, sv)
    literal = sv.value * x / math.log(x) ** k
    integral_part, _ = quad(
        lambda t: math.log(t) ** (-k), 2.0, x, epsabs=0.0, epsrel=1e-10, limit=200
    )
    return TuplePrediction(literal, sv.value * integral_part, False, sv)


@dataclass(frozen=True)
class MomentReport:
    """Empirical vs predicted r-th centered moment of psi(n+h) - psi(n)."""

    r: int
    N: int
    h: int
    empirical: float
    predicted: float
    ratio: float | None
    pieces: dict[str, float] = field(default_factory=dict)
    cramer_prediction: float | None = None  # h log N, for contrast at r = 2
    normalized: float | None = None  # empirical / (h log(N/h))^(r/2), odd r


def psi_window_moment(N: int, h: int, r: int) -> MomentReport:
    """(1/N) sum_{n <= N} (psi(n+h) - psi(n) - h)^r by sliding windows.

    Even r is compared against the Gaussian moment (r-1)!! (h log(N/h))^(r/2);
    odd r reports the normalized ratio against the same scale.  The paper-side
    guidance h <= N^(1/r) is recorded, not enforced.
    """
    N, h, r = int(N), int(h), int(r)
    if r < 1:
        raise DomainError("need r >= 1")
    if not 0 <= h <= N:
        raise DomainError("need 0 <= h <= N")
    raw = [KahanSum() for _ in range(r + 1)]  # raw[j] accumulates sum W^j
    centered = KahanSum()
    lo = 1
    while lo <= N:
        hi = min(N + 1, lo + _BLOCK)
        if h > 0:
            lam = von_mangoldt_range(lo + 1, hi + h)
            c = np.concatenate(([0.0], np.cumsum(lam)))
            idx = np.arange(hi - lo)
            W = c[idx + h] - c[idx]
        else:
            W = np.zeros(hi - lo)
        centered.add(float(np.sum((W - h) ** r)))
        for j in range(1, r + 1):
            raw[j].add(float(np.sum(W**j)))
        lo = hi
    empirical = centered.value / N
    pieces = {f"window_pow{j}_mean": raw[j].value / N for j in range(1, r + 1)}
    scale = h * math.log(N / h) if h > 0 else 0.0
    if r % 2 == 0:
        predicted = _double_factorial(r - 1) * scale ** (r // 2)
        ratio = empirical / predicted if predicted else None
        normalized = None
    else:
        predicted = 0.0
        ratio = None
        normalized = empirical / scale ** (r / 2) if scale > 0 else 0.0
    return MomentReport(
        r,
        N,
        h,
        empirical,
        predicted,
        ratio,
        pieces,
        cramer_prediction=h * math.log(N) if h > 0 else 0.0,
        normalized=normalized,
    )


def psi_window_variance(N: int, h: int) -> MomentReport:
    """Second centered moment vs h (log(N/h) + B - 1); h log N kept for contrast."""
    N, h = int(N), int(h)
    if h == 0:
        return MomentReport(2, N, 0, 0.0, 0.0, None, {}, 0.0, None)
    rep = psi_window_moment(N, h, 2)
    predicted = h * (math.log(N / h) + B_CONSTANT - 1.0)
    return MomentReport(
        2,
        N,
        h,
        rep.empirical,
        predicted,
        rep.empirical / predicted,
        rep.pieces,
        cramer_prediction=h * math.log(N),
    )


def surjection_count(r: int, k: int) -> int:
    """Number of surjections {1..r} -> {1..k} by inclusion-exclusion."""
    r, k = int(r), int(k)
    if not 1 <= k <= r:
        raise DomainError("need 1 <= k <= r")
    if r > 20:
        raise CapacityError("surjection counts limited to r <= 20")
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** r for j in range(k + 1))


@dataclass(frozen=True)
class DecompositionReport:
    """Exact combinatorial identity: the r-th raw moment of the window prime
    count reconstructed from distinct-tuple counts weighted by surjections."""

    r: int
    N: int
    h: int
    direct_int: int  # N * direct moment, exact integer
    reconstructed_int: int
    direct: float
    reconstructed: float

    @property
    def exact_equal(self) -> bool:
        return self.direct_int == self.reconstructed_int


def moment_decomposition(N: int, h: int, r: int) -> DecompositionReport:
    N, h, r = int(N), int(h), int(r)
    if r < 1 or r > 6:
        raise DomainError("identity check supports 1 <= r <= 6")
    if h < 1 or N < 1:
        raise DomainError("need N >= 1 and h >= 1")
    n_tuples = sum(math.comb(h, k) for k in range(1, r + 1))
    if n_tuples > 2 * 10**6:
        raise CapacityError(f"{n_tuples} tuples exceeds the enumeration guard")
    seg = sieve_range(0, N + h + 2)
    bits = seg.bits
    c = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
    n = np.arange(1, N + 1)
    W = c[n + h + 1] - c[n + 1]  # primes in (n, n+h]
    direct_int = int(sum(int(w) ** r for w in W.tolist()))
    recon = 0
    width = N
    for k in range(1, r + 1):
        sig = surjection_count(r, k)
        for offs in combinations(range(1, h + 1), k):
            mask = bits[1 + offs[0] : 1 + offs[0] + width].copy()
            for o in offs[1:]:
                mask &= bits[1 + o : 1 + o + width]
            recon += sig * int(np.count_nonzero(mask))
    return DecompositionReport(
        r, N, h, direct_int, recon, direct_int / N, recon / N
    )


@dataclass(frozen=True)
class DistinctSumResult:
    k: int
    h: int
    exact: float
    predicted: float
    normalization: float  # comparison scale for the odd-k smallness statement


def _pattern_centered(diffs: tuple[int, ...], prime_cutoff: int) -> float:
    """Centered singular value of the pattern {0, diffs...} for k <= 3."""
    if len(diffs) == 0:
        return 0.0  # centered value of a singleton
    if len(diffs) == 1:
        return pattern_singular(diffs, prime_cutoff) - 1.0
    if len(diffs) == 2:
        a, b = diffs
        return (
            pattern_singular((a, b), prime_cutoff)
            - pattern_singular((a,), prime_cutoff)
            - pattern_singular((b,), prime_cutoff)
            - pattern_singular((b - a,), prime_cutoff)
            + 2.0
        )
    raise DomainError("centered patterns implemented for k <= 3")


def distinct_tuple_sum_centered(
    k: int, h: int, prime_cutoff: int = BULK_CUTOFF
) -> DistinctSumResult:
    """Sum of the centered singular series over ordered distinct k-tuples
    from [1, h], vs the corrected asymptotic
    (k-1)!! (-h log h + (B+1) h)^(k/2) for even k (0 for odd k)."""
    k, h = int(k), int(h)
    if k not in (2, 3):
        raise DomainError("implemented for k in {2, 3}")
    if k == 3 and h > 10**3:
        raise CapacityError("k = 3 enumeration limited to h <= 1000")
    total = KahanSum()
    if k == 2:
        for l in range(1, h):
            total.add((h - l) * _pattern_centered((l,), prime_cutoff))
    else:
        for d2, d3 in combinations(range(1, h), 2):
            total.add((h - d3) * _pattern_centered((d2, d3), prime_cutoff))
    exact = math.factorial(k) * total.value
    scale = (h * math.log(h)) ** (k / 2)
    if k % 2 == 0:
        predicted = _double_factorial(k - 1) * (
            -h * math.log(h) + (B_CONSTANT + 1.0) * h
        ) ** (k // 2)
    else:
        predicted = 0.0
    return DistinctSumResult(k, h, exact, predicted, scale)


def distinct_tuple_sum(k: int, h: int, prime_cutoff: int = BULK_CUTOFF) -> DistinctSumResult:
    """Sum of the singular series over ordered distinct k-tuples from [1, h],
    vs h^k - C(k,2) h^(k-1) log h + C(k,2) B h^(k-1)."""
    k, h = int(k), int(h)
    if k not in (2, 3):
        raise DomainError("implemented for k in {2, 3}")
    if k == 3 and h > 10**3:
        raise CapacityError("k = 3 enumeration limited to h <= 1000")
    total = KahanSum()
    if k == 2:
        for l in range(1, h):
            total.add((h - l) * pattern_singular((l,), prime_cutoff))
    else:
        for d2, d3 in combinations(range(1, h), 2):
            total.add((h - d3) * pattern_singular((d2, d3), prime_cutoff))
    exact = math.factorial(k) * total.value
    c2 = math.comb(k, 2)
    predicted = h**k - c2 * h ** (k - 1) * math.log(h) + c2 * B_CONSTANT * h ** (k - 1)
    return DistinctSumResult(k, h, exact, predicted, (h * math.log(h)) ** (k / 2))


def pair_centered_oracle(h: int, prime_cutoff: int = BULK_CUTOFF) -> float:
    """Independent route for the k = 2 centered sum:
    2 sum_{l < h} S({0,l})(h-l) - (h^2 - h), via the bulk pair engine."""
    h = int(h)
    S = pair_singular_upto(h - 1, prime_cutoff)
    weights = (h - np.arange(h, dtype=np.float64))[1:h]
    return 2.0 * float(np.dot(S[1:h], weights)) - (h * h - h)
