"""Singular series machinery for prime tuples.

For a set of offsets H = {h_1 < ... < h_k} the local factor at a prime p is

    (1 - nu_H(p)/p) * (1 - 1/p)^(-k),

with nu_H(p) the number of residue classes mod p occupied by H.  The product
over all primes converges (factors are 1 + O(p^-2) once p exceeds every
pairwise difference); we evaluate it truncated at a prime cutoff and certify
the discarded tail with an explicit bound.

Also here: exact counts of admissible residues modulo squarefree q, the
centered (alternating-subset) transform, bulk values over pair patterns
{0, l}, averages over k-subsets of [1, h], the weighted pair-sum expansion
with its second-order constant B = 1 - gamma - log(2 pi), and the Dirichlet
series F(s) = sum S({0,l}) l^(-s) = zeta(s) G(s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable

import numpy as np

from .sieve import _distinct_prime_factors, is_prime, primes_upto
from .util import CapacityError, DomainError
from .zetafn import zeta

DEFAULT_CUTOFF = 10**6  # scalar queries
BULK_CUTOFF = 10**4  # inside large averages, tail bound recorded

#: Second-order constant of the weighted pair sum: 1 - euler_gamma - log(2 pi),
#: evaluated at import time.
B_CONSTANT = 1.0 - float(np.euler_gamma) - math.log(2.0 * math.pi)


@dataclass(frozen=True)
class TupleSet:
    """Sorted distinct nonnegative offsets; the empty set is allowed."""

    offsets: tuple[int, ...]

    def __post_init__(self) -> None:
        offs = self.offsets
        if any(int(h) != h or h < 0 for h in offs):
            raise DomainError("offsets must be nonnegative integers")
        if any(offs[i] >= offs[i + 1] for i in range(len(offs) - 1)):
            raise DomainError("offsets must be strictly increasing")

    @classmethod
    def of(cls, *offsets: int) -> "TupleSet":
        return cls(tuple(sorted({int(h) for h in offsets})))

    @classmethod
    def from_iterable(cls, offsets: Iterable[int]) -> "TupleSet":
        return cls(tuple(sorted({int(h) for h in offsets})))

    @property
    def k(self) -> int:
        return len(self.offsets)

    def shifted(self, c: int) -> "TupleSet":
        return TupleSet(tuple(h + c for h in self.offsets))


@dataclass(frozen=True)
class SingularValue:
    """Truncated Euler product plus a rigorous relative tail bound."""

    value: float
    prime_cutoff: int
    tail_bound: float
    vanishes: bool


def occupied_residues(H: TupleSet, p: int) -> int:
    """Number of distinct residue classes occupied by H mod p."""
    if H.k == 0:
        raise DomainError("occupied_residues needs a nonempty tuple set")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return len({h % p for h in H.offsets})


def local_factor(H: TupleSet, p: int) -> float:
    """(1 - nu/p) (1 - 1/p)^(-k); zero exactly when H covers all classes mod p."""
    if H.k == 0:
        return 1.0
    nu = occupied_residues(H, p)
    if nu == p:
        return 0.0
    return (1.0 - nu / p) * (1.0 - 1.0 / p) ** (-H.k)


@lru_cache(maxsize=64)
def _generic_logsum(k: int, cutoff: int) -> float:
    """Sum of log[(1 - k/p)(1 - 1/p)^(-k)] over primes k < p <= cutoff."""
    ps = primes_upto(cutoff)
    ps = ps[ps > k].astype(np.float64)
    return float(np.sum(np.log1p(-k / ps) - k * np.log1p(-1.0 / ps)))


def _exceptional_primes(offsets: tuple[int, ...]) -> set[int]:
    """Primes where nu can differ from k: p <= k or p dividing a pairwise gap."""
    k = len(offsets)
    out = set(primes_upto(k).tolist())
    for i in range(k):
        for j in range(i + 1, k):
            d = offsets[j] - offsets[i]
            out.update(_distinct_prime_factors(d))
    return out


def tail_bound_relative(k: int, prime_cutoff: int) -> float:
    """Certified relative error of truncation at prime_cutoff.

    For p > cutoff >= max(2k^2, max H) every factor is (1 - k/p)(1 - 1/p)^(-k)
    whose log is bounded by 2 k^2 / p^2; summing p^(-2) over p > cutoff is
    below 1/(cutoff - 1) by integral comparison.
    """
    return math.expm1(2.0 * k * k / (prime_cutoff - 1))


def singular_series(H: TupleSet, prime_cutoff: int = DEFAULT_CUTOFF) -> SingularValue:
    """Truncated Euler product for H with a certified tail bound."""
    prime_cutoff = int(prime_cutoff)
    k = H.k
    if k == 0:
        return SingularValue(1.0, prime_cutoff, 0.0, False)
    max_off = max(H.offsets)
    min_cutoff = max(max_off, k, 2 * k * k)
    if prime_cutoff <= min_cutoff:
        raise DomainError(
            f"prime_cutoff {prime_cutoff} too small for a controlled tail; "
            f"need > {min_cutoff} for k={k}, max offset {max_off}"
        )
    exceptional = sorted(_exceptional_primes(H.offsets))
    log_v = _generic_logsum(k, prime_cutoff)
    scale = 1.0
    vanishes = False
    for p in exceptional:
        if p > prime_cutoff:
            continue
        f = local_factor(H, p)
        if f == 0.0:
            vanishes = True
            break
        if p > k:
            # replace the generic factor included in the cached log sum
            log_v -= math.log1p(-k / p) - k * math.log1p(-1.0 / p)
        scale *= f
    if vanishes:
        return SingularValue(0.0, prime_cutoff, 0.0, True)
    # k = 1: every factor is exactly (1 - 1/p)(1 - 1/p)^(-1) = 1
    tail = 0.0 if k == 1 else tail_bound_relative(k, prime_cutoff)
    return SingularValue(scale * math.exp(log_v), prime_cutoff, tail, False)


@lru_cache(maxsize=200_000)
def pattern_singular(diffs: tuple[int, ...], prime_cutoff: int = BULK_CUTOFF) -> float:
    """Singular value of the pattern {0, diffs...}; cached on the gap vector.

    Translation invariance makes every k-subset with the same gap vector share
    this value, which is what makes large averages affordable.
    """
    H = TupleSet((0,) + tuple(diffs)) if diffs else TupleSet((0,))
    return singular_series(H, prime_cutoff).value


def admissible_residue_count(H: TupleSet, q: int) -> int:
    """#{n mod q : gcd(n + h_i, q) = 1 for all i} for squarefree q, exactly
    prod_{p | q} (p - nu_H(p))."""
    q = int(q)
    if q < 1:
        raise DomainError("modulus must be >= 1")
    if q == 1:
        return 1
    fac = _distinct_prime_factors(q)
    if math.prod(fac) != q:
        raise DomainError(f"{q} is not squarefree")
    out = 1
    for p in fac:
        out *= p - (occupied_residues(H, p) if H.k else 0)
    return out


def singular_series_mod(H: TupleSet, q: int) -> float:
    """Finite-modulus singular factor: product of local factors over p | q."""
    q = int(q)
    if q < 1:
        raise DomainError("modulus must be >= 1")
    if q == 1:
        return 1.0
    fac = _distinct_prime_factors(q)
    if math.prod(fac) != q:
        raise DomainError(f"{q} is not squarefree")
    out = 1.0
    for p in fac:
        out *= local_factor(H, p)
    return out


def centered_singular_series(H: TupleSet, prime_cutoff: int = DEFAULT_CUTOFF) -> float:
    """Alternating-subset transform: sum over J subset H of (-1)^(|H|-|J|) S(J).

    The empty set contributes S(empty) = 1; the inverse relation
    S(H) = sum over J of centered(J) round-trips to float precision.
    """
    k = H.k
    if k > 20:
        raise CapacityError("centered transform enumerates 2^k subsets; k > 20 refused")
    total = 0.0
    for j in range(k + 1):
        sign = -1.0 if (k - j) % 2 else 1.0
        for sub in combinations(H.offsets, j):
            total += sign * singular_series(TupleSet(sub), prime_cutoff).value
    return total


def pair_singular_upto(h: int, prime_cutoff: int = 10**7) -> np.ndarray:
    """Vector of truncated singular values for the patterns {0, l}, l = 0..h.

    S[l] = 0 for odd l; for even l >= 2 it is the truncated twin constant
    times prod_{odd p | l, p <= cutoff} (p-1)/(p-2).  Entry 0 is unused.
    """
    h = int(h)
    if h < 1:
        raise DomainError("need h >= 1")
    prime_cutoff = int(prime_cutoff)
    if prime_cutoff < 3:
        raise DomainError("cutoff must include the prime 2")
    twin_truncated = 2.0 * math.exp(_generic_logsum(2, prime_cutoff))
    corr = np.ones(h + 1, dtype=np.float64)
    for p in primes_upto(min(h, prime_cutoff)).tolist():
        if p == 2:
            continue
        corr[p::p] *= (p - 1.0) / (p - 2.0)
    out = np.zeros(h + 1, dtype=np.float64)
    out[2::2] = twin_truncated * corr[2::2]
    return out


@dataclass(frozen=True)
class SubsetAverage:
    sum_S: float
    count: int
    ratio: float


def tuple_set_average(k: int, h: int, prime_cutoff: int | None = None) -> SubsetAverage:
    """Average of the singular series over all k-subsets of [1, h].

    Subsets sharing a gap vector share their singular value, so the
    enumeration runs over gap patterns weighted by multiplicity h - span.
    """
    k, h = int(k), int(h)
    if k < 1 or h < k:
        raise DomainError("need 1 <= k <= h")
    count = math.comb(h, k)
    if count > 10**8:
        raise CapacityError(f"C({h},{k}) = {count} subsets exceeds the enumeration guard")
    if k == 1:
        return SubsetAverage(float(h), h, 1.0)
    if k == 2:
        cutoff = prime_cutoff or 10**7
        S = pair_singular_upto(h - 1, cutoff)
        weights = (h - np.arange(h, dtype=np.float64))[1:h]
        total = float(np.dot(S[1:h], weights))
        return SubsetAverage(total, count, total / count)
    cutoff = prime_cutoff or BULK_CUTOFF
    total = 0.0
    for diffs in combinations(range(1, h), k - 1):
        total += (h - diffs[-1]) * pattern_singular(diffs, cutoff)
    return SubsetAverage(total, count, total / count)


@dataclass(frozen=True)
class PairSumResult:
    h: int
    exact: float
    predicted: float
    prime_cutoff: int


def pair_sum_expansion(h: int, prime_cutoff: int = 10**7) -> PairSumResult:
    """sum_{l <= h} S({0, l}) (h - l) against h^2/2 - h log h / 2 + B h / 2."""
    h = int(h)
    if h < 2:
        raise DomainError("need h >= 2")
    S = pair_singular_upto(h, prime_cutoff)
    weights = h - np.arange(h + 1, dtype=np.float64)
    exact = float(np.dot(S[1:], weights[1:]))
    predicted = h * h / 2.0 - h * math.log(h) / 2.0 + B_CONSTANT * h / 2.0
    return PairSumResult(h, exact, predicted, int(prime_cutoff))


# ---------------------------------------------------------------------------
# Dirichlet series F(s) = sum_l S({0,l}) l^(-s) = zeta(s) G(s)

def pair_series_sum(s: complex, n_terms: int, prime_cutoff: int = 10**7) -> complex:
    """Truncated Dirichlet sum of the pair singular values (needs Re(s) > 1)."""
    s = complex(s)
    if s.real <= 1.0:
        raise DomainError("the Dirichlet sum converges only for Re(s) > 1")
    S = pair_singular_upto(int(n_terms), prime_cutoff)
    l = np.arange(2, n_terms + 1, 2, dtype=np.float64)
    return complex(np.sum(S[2::2] * np.exp(-s * np.log(l))))


def pair_series_g(s: complex, prime_cutoff: int = 10**6) -> complex:
    """G(s) = prod_p (1 - 1/(p-1)^2 + p^(1-s)/(p-1)^2), absolutely convergent
    for Re(s) > 0.  G(1) = 1 exactly (every factor is 1)."""
    s = complex(s)
    if s.real <= 0.0:
        raise DomainError("the G product needs Re(s) > 0")
    if s == 1:
        return complex(1.0)
    p = primes_upto(int(prime_cutoff)).astype(np.float64)
    inv = 1.0 / (p - 1.0) ** 2
    factors = 1.0 - inv + np.exp((1.0 - s) * np.log(p)) * inv
    return complex(np.exp(np.sum(np.log(factors))))


def pair_series_h(s: complex, prime_cutoff: int = 10**6) -> complex:
    """H(s) with G(s) = zeta(s+1) H(s): each factor carries (1 - p^(-s-1))."""
    s = complex(s)
    if s.real <= -0.5:
        raise DomainError("the H product needs Re(s) > -1/2")
    p = primes_upto(int(prime_cutoff)).astype(np.float64)
    inv = 1.0 / (p - 1.0) ** 2
    g = 1.0 - inv + np.exp((1.0 - s) * np.log(p)) * inv
    factors = (1.0 - np.exp(-(s + 1.0) * np.log(p))) * g
    return complex(np.exp(np.sum(np.log(factors))))


def pair_dirichlet_series(
    s: complex, term_cutoff: int = 10**6, prime_cutoff: int = 10**6
) -> tuple[complex, complex]:
    """(truncated series, zeta(s) * truncated G product); they agree within
    the combined truncation error for Re(s) >= 1.5."""
    product = zeta(s) * pair_series_g(s, prime_cutoff)
    series = pair_series_sum(s, term_cutoff, max(prime_cutoff, 10**6))
    return series, product
