"""Riemann zeta in double precision on Re(s) > 0.

Two evaluation routes:
  * accelerated alternating (eta) series for 0 < Re(s) <= 2 at moderate height,
  * Euler-Maclaurin elsewhere.

Accuracy target ~1e-12 relative for the s this package needs (|Im s| <~ 100).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .util import DomainError, PoleError

# Bernoulli numbers B_2 .. B_14 for the Euler-Maclaurin tail
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)


@lru_cache(maxsize=32)
def _eta_coeffs(n: int) -> tuple[float, ...]:
    # Chebyshev-weighted partial-sum coefficients for the accelerated eta
    # series; term_j = n * (n+j-1)! 4^j / ((n-j)! (2j)!), built by ratios
    d = [0.0] * (n + 1)
    acc = 0.0
    term = 1.0  # j = 0 value of n * (n-1)!/n! = 1
    for j in range(n + 1):
        if j > 0:
            term *= (n + j - 1) * (n - j + 1) * 4.0 / ((2 * j) * (2 * j - 1))
        acc += term
        d[j] = acc
    return tuple(d)


def _zeta_eta(s: complex) -> complex:
    n = 24 + int(abs(s.imag) * (math.pi / 2.0) / 1.7627) + 8
    n = min(n, 320)
    d = _eta_coeffs(n)
    dn = d[n]
    k = np.arange(1, n + 1, dtype=np.float64)
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    terms = signs * (np.asarray(d[:n]) - dn) * np.exp(-s * np.log(k))
    eta_sum = -complex(np.sum(terms)) / dn
    denom = 1.0 - 2.0 ** (1.0 - s)
    return eta_sum / denom


def _zeta_em(s: complex) -> complex:
    N = max(24, int(1.3 * abs(s.imag)) + 10)
    n = np.arange(1, N, dtype=np.float64)
    total = complex(np.sum(np.exp(-s * np.log(n))))
    total += N ** (1.0 - s) / (s - 1.0)
    total += 0.5 * N ** (-s)
    # Bernoulli correction terms with rising factorial s(s+1)...(s+2j-2)
    rising = s
    npow = N ** (-s - 1.0)
    fact = 1.0
    for j, b in enumerate(_BERNOULLI, start=1):
        fact *= (2 * j - 1) * (2 * j) if j > 1 else 2
        total += b / fact * rising * npow
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        npow /= N * N
    return total


def zeta(s: complex) -> complex:
    """zeta(s) for Re(s) > 0, s != 1."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.real <= 0:
        raise DomainError("zeta implemented for Re(s) > 0 only")
    if s.real <= 2.0 and abs(s.imag) <= 100.0:
        return _zeta_eta(s)
    return _zeta_em(s)
