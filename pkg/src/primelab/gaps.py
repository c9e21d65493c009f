"""Empirical prime-gap and window-count statistics vs Poisson/exponential laws,
plus a Monte Carlo model of primality as independent 1/log n coin flips."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .sieve import iter_segments, primes_upto
from .util import DomainError, KahanSum, rng_from_seed


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    underflow: int
    overflow: int
    total: int

    def __post_init__(self) -> None:
        if np.any(np.diff(self.edges) <= 0):
            raise DomainError("histogram edges must be strictly increasing")
        if int(self.counts.sum()) + self.underflow + self.overflow != self.total:
            raise DomainError("histogram counts do not conserve the total")

    @property
    def fractions(self) -> np.ndarray:
        return self.counts / max(self.total, 1)


def make_histogram(values: np.ndarray, edges: Sequence[float]) -> Histogram:
    edges = np.asarray(edges, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    counts, _ = np.histogram(values, bins=edges)
    under = int(np.count_nonzero(values < edges[0]))
    over = int(np.count_nonzero(values >= edges[-1]))
    return Histogram(edges, counts.astype(np.int64), under, over, int(values.size))


def exponential_bin_mass(edges: Sequence[float]) -> np.ndarray:
    """Target masses integral of e^(-t) over each bin."""
    e = np.asarray(edges, dtype=np.float64)
    return np.exp(-e[:-1]) - np.exp(-e[1:])


def gap_histogram(N: int, edges: Sequence[float], normalization: str = "log_p") -> Histogram:
    """Histogram of normalized gaps between consecutive primes, both <= N.

    normalization 'log_p' divides the gap after p_n by log p_n; 'log_index'
    divides by log n (the index), skipping n = 1 where log n = 0.
    """
    N = int(N)
    if N < 3:
        raise DomainError("need N >= 3")
    primes = primes_upto(N)
    if primes.size < 2:
        raise DomainError("fewer than two primes below N")
    gaps = np.diff(primes).astype(np.float64)
    if normalization == "log_p":
        denom = np.log(primes[:-1].astype(np.float64))
        vals = gaps / denom
    elif normalization == "log_index":
        idx = np.arange(2, primes.size, dtype=np.float64)
        vals = gaps[1:] / np.log(idx)
    else:
        raise DomainError(f"unknown normalization {normalization!r}")
    return make_histogram(vals, edges)


def _round_window(x: float, rounding: str) -> int:
    if rounding == "nearest":
        return max(1, int(round(x)))
    if rounding == "ceil":
        return max(1, int(math.ceil(x)))
    if rounding == "floor":
        return max(1, int(math.floor(x)))
    raise DomainError(f"unknown rounding {rounding!r}")


@dataclass(frozen=True)
class WindowCounts:
    """Empirical distribution of prime counts in sliding windows."""

    N: int
    lam: float
    window_rule: str
    rounding: str
    h: int | None  # fixed window length (None when the rule varies with n)
    counts: np.ndarray  # counts[k] = #{n <= N with exactly k primes in window}

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.N

    @property
    def lambda_effective(self) -> float | None:
        return self.h / math.log(self.N) if self.h is not None else None


def window_count_distribution(
    N: int,
    lam: float,
    window_rule: str = "lambda_log_N",
    rounding: str = "nearest",
) -> WindowCounts:
    """Distribution of pi(n + h) - pi(n) over n <= N.

    window_rule 'lambda_log_N' fixes h = round(lam * log N); 'lambda_log_n'
    sets h = round(lam * log n) per n.  The rounding mode is recorded.
    """
    N = int(N)
    if N < 10 or lam <= 0:
        raise DomainError("need N >= 10 and lambda > 0")
    fixed = window_rule == "lambda_log_N"
    if not fixed and window_rule != "lambda_log_n":
        raise DomainError(f"unknown window rule {window_rule!r}")
    h_fixed = _round_window(lam * math.log(N), rounding) if fixed else None
    h_max = h_fixed if fixed else _round_window(lam * math.log(N), rounding)
    acc = np.zeros(64, dtype=np.int64)
    block = 1 << 22
    lo = 1
    while lo <= N:
        hi = min(N + 1, lo + block)
        # bits over [lo+1, hi+h_max]: window (n, n+h] = [n+1, n+h+1)
        seg = iter_segments(lo + 1, hi + h_max + 1)
        bits = np.concatenate([s.bits for s in seg])
        c = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
        n = np.arange(lo, hi)
        if fixed:
            h = h_fixed
        else:
            if rounding == "ceil":
                h = np.ceil(lam * np.log(n)).astype(np.int64)
            elif rounding == "floor":
                h = np.floor(lam * np.log(n)).astype(np.int64)
            else:
                h = np.round(lam * np.log(n)).astype(np.int64)
            h = np.maximum(1, h)
        w = c[n + h - lo] - c[n - lo]
        part = np.bincount(w, minlength=acc.size)
        if part.size > acc.size:
            acc = np.concatenate([acc, np.zeros(part.size - acc.size, dtype=np.int64)])
        acc[: part.size] += part
        lo = hi
    acc = acc[: max(1, int(np.max(np.nonzero(acc)[0])) + 1) if acc.any() else 1]
    return WindowCounts(N, float(lam), window_rule, rounding, h_fixed, acc)


def poisson_pmf(lam: float, k: int) -> float:
    """lambda^k e^(-lambda) / k!, evaluated in log space."""
    if lam <= 0 or k < 0:
        raise DomainError("need lambda > 0 and k >= 0")
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


def poisson_normal_check(lam: float) -> float:
    """Kolmogorov distance between the standardized Poisson(lam) CDF and the
    standard normal CDF; decreases like 1/sqrt(lam)."""
    if lam < 10:
        raise DomainError("need lambda >= 10")
    sd = math.sqrt(lam)
    k_lo = max(0, int(lam - 14 * sd))
    k_hi = int(lam + 14 * sd) + 1
    ks = np.arange(k_lo, k_hi)
    logpmf = ks * math.log(lam) - lam - np.array([math.lgamma(k + 1) for k in ks])
    pmf = np.exp(logpmf)
    cdf = np.cumsum(pmf)
    z = (ks - lam) / sd
    phi = 0.5 * (1.0 + np.vectorize(math.erf)(z / math.sqrt(2.0)))
    left = np.concatenate(([0.0], cdf[:-1]))
    return float(np.max(np.maximum(np.abs(cdf - phi), np.abs(left - phi))))


@dataclass(frozen=True)
class CramerSample:
    """Deterministic draw of the independent-coin primality model."""

    seed: int
    start: int
    length: int
    draws: np.ndarray  # bool, position i is 'prime' with probability 1/log(start+i)


@dataclass(frozen=True)
class CramerMomentRow:
    order: int
    empirical: float
    predicted: float  # Gaussian-scale moment for even order, 0 for odd
    normalized: float  # empirical / (h / log N)^(order/2)


@dataclass(frozen=True)
class CramerReport:
    sample: CramerSample
    h: int | None
    moments: list[CramerMomentRow] = field(default_factory=list)


def _double_factorial(n: int) -> float:
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out


def cramer_simulate(
    seed: int,
    start: int,
    length: int,
    h: int | None = None,
    orders: Sequence[int] = (1, 2, 3, 4),
) -> CramerReport:
    """Draw the model over [start, start + length) and report centered window
    moments against the Gaussian-scale predictions.

    Window sums use the model-centered variables X(n) - 1/log n over blocks of
    h consecutive positions; predictions use (h / log N)^(k/2) with N the end
    of the sampled range.
    """
    start, length = int(start), int(length)
    if start < 3:
        raise DomainError("need start >= 3 so that log n > 1")
    if length < 0:
        raise DomainError("length must be nonnegative")
    rng = rng_from_seed(seed)
    n = np.arange(start, start + length, dtype=np.float64)
    p = 1.0 / np.log(n) if length else np.empty(0)
    draws = rng.random(length) < p
    sample = CramerSample(int(seed), start, length, draws)
    if h is None:
        return CramerReport(sample, None, [])
    h = int(h)
    if h < 1:
        raise DomainError("need h >= 1")
    rows: list[CramerMomentRow] = []
    n_ref = start + length
    scale_base = h / math.log(n_ref) if length else 1.0
    if length > h:
        x0 = draws.astype(np.float64) - p
        c = np.concatenate(([0.0], np.cumsum(x0)))
        S = c[h:] - c[:-h]
    else:
        S = np.empty(0)
    for k in orders:
        k = int(k)
        emp = float(np.mean(S**k)) if S.size else 0.0
        if k % 2 == 0:
            pred = _double_factorial(k - 1) * scale_base ** (k / 2)
        else:
            pred = 0.0
        rows.append(CramerMomentRow(k, emp, pred, emp / scale_base ** (k / 2)))
    return CramerReport(sample, h, rows)
