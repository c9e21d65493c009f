"""Zeta-zero ingestion and the explicit-formula side of prime counting.

A ZeroTable holds ascending positive ordinates gamma of zeros 1/2 + i gamma.
From it: truncated explicit-formula reconstructions of psi(x), the zero-pair
double sum for the variance of psi in short windows, oscillatory cosine-sum
moments, and a Monte Carlo model of the long-range bias with independent
uniform phases on each zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .util import DomainError, rng_from_seed
from .zerogen import zero_count_estimate

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ZeroTable:
    ordinates: np.ndarray  # ascending, > 0
    count: int
    t_max: float

    def upto(self, T: float) -> np.ndarray:
        idx = int(np.searchsorted(self.ordinates, T, side="right"))
        return self.ordinates[:idx]


def _validate_density(ordinates: np.ndarray) -> None:
    # count(gamma <= T) must track (T/2pi) log(T/(2 pi e)) + 7/8 within 5%
    t_max = float(ordinates[-1])
    checks = [T for T in (50.0, 100.0, t_max / 2.0, t_max) if 50.0 <= T <= t_max]
    for T in checks:
        observed = int(np.searchsorted(ordinates, T, side="right"))
        predicted = zero_count_estimate(T)
        if predicted > 10 and abs(observed - predicted) > 0.05 * predicted:
            raise DomainError(
                f"zero density off at T={T:.1f}: observed {observed}, "
                f"expected about {predicted:.1f}"
            )


def zero_table_from_array(ordinates: np.ndarray) -> ZeroTable:
    ordinates = np.asarray(ordinates, dtype=np.float64)
    if ordinates.size == 0:
        raise DomainError("empty zero table")
    if np.any(ordinates <= 0):
        raise DomainError("ordinates must be positive")
    if np.any(np.diff(ordinates) <= 0):
        raise DomainError("ordinates must be strictly ascending")
    _validate_density(ordinates)
    out = ordinates.copy()
    out.setflags(write=False)
    return ZeroTable(out, int(out.size), float(out[-1]))


def load_zeros(path) -> ZeroTable:
    """Read a plain-text table: one positive decimal ordinate per line,
    ascending; lines starting with '#' are comments.  Errors carry the
    offending line number."""
    vals: list[float] = []
    prev = 0.0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                g = float(text)
            except ValueError:
                raise DomainError(f"{path}:{lineno}: not a number: {text!r}") from None
            if g <= 0:
                raise DomainError(f"{path}:{lineno}: ordinate must be positive, got {g}")
            if g <= prev:
                raise DomainError(
                    f"{path}:{lineno}: ordinates must ascend ({g} after {prev})"
                )
            vals.append(g)
            prev = g
    if not vals:
        raise DomainError(f"{path}: no ordinates found")
    return zero_table_from_array(np.asarray(vals))


@dataclass(frozen=True)
class ZeroCountCheck:
    T: float
    observed: int
    predicted: float  # refined form with the 7/8 constant
    predicted_leading: float  # bare (T/2pi) log T


def zero_count_check(table: ZeroTable, T: float) -> ZeroCountCheck:
    T = float(T)
    if T > table.t_max:
        raise DomainError(f"T={T} beyond the table (t_max={table.t_max:.2f})")
    observed = int(np.searchsorted(table.ordinates, T, side="right"))
    return ZeroCountCheck(
        T, observed, zero_count_estimate(T), T / _TWO_PI * math.log(T) if T > 0 else 0.0
    )


def _taper_weights(g: np.ndarray, T: float) -> np.ndarray:
    """Gaussian taper over the last 10% of [0, T] (3 sigma at T)."""
    w = np.ones_like(g)
    knee = 0.9 * T
    sigma = 0.1 * T / 3.0
    tail = g > knee
    w[tail] = np.exp(-0.5 * ((g[tail] - knee) / sigma) ** 2)
    return w


def psi_explicit(x: float, T: float, table: ZeroTable, taper: bool = True) -> float:
    """Truncated explicit formula x - 2 sqrt(x) sum_{gamma <= T} Re(x^(i gamma) / rho).

    With T = 0 this returns x exactly.  The Gaussian taper (default on)
    suppresses truncation ringing near prime powers.
    """
    x = float(x)
    if x < 2:
        raise DomainError("need x >= 2")
    if T < 0 or T > table.t_max:
        raise DomainError(f"need 0 <= T <= t_max={table.t_max:.2f}")
    g = table.upto(T)
    if g.size == 0:
        return x
    rho = 0.5 + 1j * g
    terms = (np.exp(1j * g * math.log(x)) / rho).real
    if taper:
        terms = terms * _taper_weights(g, T)
    return x - 2.0 * math.sqrt(x) * float(np.sum(terms))


def psi_explicit_zero_sum_complex(x: float, T: float, table: ZeroTable) -> complex:
    """Zero sum over both rho = 1/2 + i gamma and its conjugate, without the
    real-pairing shortcut; the imaginary part cancels to rounding."""
    x = float(x)
    g = table.upto(T)
    rho = np.concatenate([0.5 + 1j * g, 0.5 - 1j * g])
    return complex(np.sum(np.exp(rho * math.log(x)) / rho))


@dataclass(frozen=True)
class ZeroPairVariance:
    X: float
    h: float
    cutoff: float  # zero cutoff X/h
    zeros_used: int
    value: float
    bound_scale: float  # h (1 + log(X/h))^2

    @property
    def ratio_to_bound(self) -> float:
        return self.value / self.bound_scale


def window_variance_zeros(
    X: float, h: float, table: ZeroTable, pair_guard: int = 30_000
) -> ZeroPairVariance:
    """Evaluate the zero-pair double sum

        (h^2/X) sum_{|g1|,|g2| <= X/h} X^(i(g1-g2)) (2^(1+i(g1-g2)) - 1)/(1 + i(g1-g2))

    exactly over the table (O(M^2) pairs, chunked)."""
    X, h = float(X), float(h)
    if h <= 0 or X <= 0:
        raise DomainError("need X, h > 0")
    cutoff = X / h
    if cutoff > table.t_max:
        raise DomainError(f"X/h = {cutoff:.1f} beyond the table (t_max={table.t_max:.2f})")
    g = table.upto(cutoff)
    M = int(g.size)
    if M > pair_guard:
        raise DomainError(f"{M} zeros gives {4*M*M} pairs; guard is M <= {pair_guard}")
    if M == 0:
        return ZeroPairVariance(X, h, cutoff, 0, 0.0, h * (1.0 + math.log(cutoff)) ** 2)
    signed = np.concatenate([g, -g])
    total = 0.0
    lx = math.log(X)
    chunk = max(1, (1 << 22) // (2 * M))
    for i in range(0, 2 * M, chunk):
        d = signed[i : i + chunk, None] - signed[None, :]
        term = np.exp(1j * d * lx) * (2.0 * np.exp(1j * d * math.log(2.0)) - 1.0) / (
            1.0 + 1j * d
        )
        total += float(term.real.sum())
    value = h * h / X * total
    return ZeroPairVariance(X, h, cutoff, M, value, h * (1.0 + math.log(cutoff)) ** 2)


@dataclass(frozen=True)
class CosineMomentResult:
    X: float
    T: float
    k: int
    zeros_used: int
    empirical: float
    predicted: float  # (k-1)!! X (2 N(T))^(k/2) for even k, else 0
    normalized: float  # empirical / (X N(T)^(k/2))


def _double_factorial(n: int) -> float:
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out


def cosine_sum_moment(
    X: float,
    T: float,
    k: int,
    table: ZeroTable,
    min_exponent: float = 1.1,
    rel_tol: float = 1e-8,
) -> CosineMomentResult:
    """integral_X^{2X} (sum_{gamma <= T} 2 cos(gamma log x))^k dx by panel
    Gauss-Legendre quadrature with panel width tied to the top frequency.

    Refuses X < T^min_exponent: below that the moments are not expected to be
    Gaussian and the quadrature budget explodes.
    """
    X, T, k = float(X), float(T), int(k)
    if k < 1 or k > 6:
        raise DomainError("need 1 <= k <= 6")
    if T > table.t_max:
        raise DomainError(f"T={T} beyond the table (t_max={table.t_max:.2f})")
    if X < T**min_exponent:
        raise DomainError(
            f"X = {X:g} violates the X >= T^{min_exponent} constraint (T^{min_exponent} "
            f"= {T**min_exponent:g}); the regime below it is out of contract"
        )
    g = table.upto(T)
    n_zeros = int(g.size)
    if n_zeros == 0:
        return CosineMomentResult(X, T, k, 0, 0.0, 0.0, 0.0)
    nodes, weights = np.polynomial.legendre.leggauss(12)

    def integrate(n_panels: int) -> float:
        edges = np.linspace(X, 2.0 * X, n_panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        xs = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        ws = (half[:, None] * weights[None, :]).ravel()
        vals = np.zeros_like(xs)
        blk = max(1, (1 << 21) // max(n_zeros, 1))
        for i in range(0, xs.size, blk):
            x = xs[i : i + blk]
            vals[i : i + blk] = (2.0 * np.cos(np.log(x)[:, None] * g[None, :])).sum(axis=1)
        return float(np.sum(ws * vals**k))

    # panels no wider than a quarter wavelength of the top frequency at x = X
    n0 = max(8, int(math.ceil(2.0 * X / (0.25 * _TWO_PI * X / max(T, 1.0)))))
    est = integrate(n0)
    for _ in range(6):
        n0 *= 2
        nxt = integrate(n0)
        if abs(nxt - est) <= rel_tol * max(abs(nxt), X):
            est = nxt
            break
        est = nxt
    NT = float(n_zeros)
    predicted = _double_factorial(k - 1) * X * (2.0 * NT) ** (k / 2) if k % 2 == 0 else 0.0
    return CosineMomentResult(X, T, k, n_zeros, est, predicted, est / (X * NT ** (k / 2)))


@dataclass(frozen=True)
class BiasModelSummary:
    samples: int
    mean: float
    variance: float
    predicted_variance: float  # (1/2) sum 1/(1/4 + gamma^2)
    symmetry_z: float  # |mean| / (std / sqrt(samples))
    draws: np.ndarray


def chebyshev_bias_sim(
    table: ZeroTable, samples: int, seed: int, T: float | None = None
) -> BiasModelSummary:
    """Monte Carlo of Re sum_gamma e^(i theta_gamma) / (1/2 + i gamma) with
    independent uniform phases; the distribution is symmetric about 0."""
    samples = int(samples)
    if samples < 10**3:
        raise DomainError("need samples >= 1000")
    g = table.upto(T if T is not None else table.t_max)
    if g.size == 0:
        raise DomainError("empty zero selection")
    denom = 0.25 + g * g
    re_coef = 0.5 / denom
    im_coef = g / denom
    rng = rng_from_seed(seed)
    out = np.zeros(samples)
    chunk = max(1, (1 << 22) // samples)
    for i in range(0, g.size, chunk):
        theta = rng.uniform(0.0, _TWO_PI, size=(samples, min(chunk, g.size - i)))
        out += np.cos(theta) @ re_coef[i : i + chunk] + np.sin(theta) @ im_coef[i : i + chunk]
    mean = float(np.mean(out))
    var = float(np.var(out))
    pred = float(0.5 * np.sum(1.0 / denom))
    sym = abs(mean) / (math.sqrt(var / samples)) if var > 0 else 0.0
    return BiasModelSummary(samples, mean, var, pred, sym, out)
