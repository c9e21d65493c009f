"""Desk-scale generation of Riemann zeta zero ordinates.

Hardy's Z function is evaluated two ways: Euler-Maclaurin below t = 2000 and
the Riemann-Siegel main sum with the first remainder term above.  Zeros are
bracketed on an oversampled grid, polished by bisection, and suspicious gaps
are rescanned at finer resolution (close pairs hide from coarse grids).

Accuracy is a few 1e-5 in the ordinate at worst, plenty for explicit-formula
reconstruction; there is no network here, so datasets are produced locally.
"""

from __future__ import annotations

import math

import numpy as np

from .util import DomainError

_EM_CROSSOVER = 2000.0
_TWO_PI = 2.0 * math.pi

_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)


def rs_theta(t):
    """Riemann-Siegel theta, asymptotic expansion (t >= ~1)."""
    t = np.asarray(t, dtype=np.float64)
    return (
        t / 2.0 * np.log(t / _TWO_PI)
        - t / 2.0
        - math.pi / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t**3)
    )


def _z_euler_maclaurin(ts: np.ndarray) -> np.ndarray:
    """Z(t) = exp(i theta) zeta(1/2 + it) via Euler-Maclaurin (t < ~2500)."""
    ts = np.asarray(ts, dtype=np.float64)
    s = 0.5 + 1j * ts
    N = max(50, int(0.8 * float(np.max(ts))) + 20)
    n = np.arange(1, N, dtype=np.float64)
    zeta = np.exp(-s[:, None] * np.log(n)[None, :]).sum(axis=1)
    zeta += N ** (1.0 - s) / (s - 1.0)
    zeta += 0.5 * N ** (-s)
    rising = s.copy()
    npow = N ** (-s - 1.0)
    fact = 1.0
    for j, b in enumerate(_BERNOULLI, start=1):
        fact *= (2 * j - 1) * (2 * j) if j > 1 else 2
        zeta += b / fact * rising * npow
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        npow = npow / (N * N)
    return (np.exp(1j * rs_theta(ts)) * zeta).real


def _z_riemann_siegel(ts: np.ndarray) -> np.ndarray:
    """Main sum plus the first remainder term (t >= ~50)."""
    ts = np.asarray(ts, dtype=np.float64)
    out = np.empty_like(ts)
    tau = np.sqrt(ts / _TWO_PI)
    nu = np.floor(tau).astype(np.int64)
    theta = rs_theta(ts)
    for v in np.unique(nu):
        m = nu == v
        t = ts[m]
        n = np.arange(1, v + 1, dtype=np.float64)
        args = theta[m][:, None] - t[:, None] * np.log(n)[None, :]
        main = 2.0 * (np.cos(args) / np.sqrt(n)).sum(axis=1)
        p = tau[m] - v
        # remainder c0(p) has removable singularities at cos(2 pi p) = 0;
        # nudge p off them (error ~1e-5 in Z, harmless)
        denom = np.cos(_TWO_PI * p)
        p = np.where(np.abs(denom) < 1e-5, p + 3e-6, p)
        c0 = np.cos(_TWO_PI * (p * p - p - 1.0 / 16.0)) / np.cos(_TWO_PI * p)
        sign = np.where(v % 2 == 1, 1.0, -1.0)
        out[m] = main + sign * (ts[m] / _TWO_PI) ** (-0.25) * c0
    return out


def hardy_z(ts) -> np.ndarray:
    """Vectorized Hardy Z; sign changes locate zeros on the critical line."""
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    if np.any(ts < 5.0):
        raise DomainError("hardy_z implemented for t >= 5")
    out = np.empty_like(ts)
    lo = ts < _EM_CROSSOVER
    if np.any(lo):
        out[lo] = _z_euler_maclaurin(ts[lo])
    if np.any(~lo):
        out[~lo] = _z_riemann_siegel(ts[~lo])
    return out


def _bisect_roots(lo: np.ndarray, hi: np.ndarray, iters: int = 40) -> np.ndarray:
    """Vectorized bisection on hardy_z for brackets with a sign change."""
    flo = hardy_z(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fmid = hardy_z(mid)
        take_left = np.signbit(flo) != np.signbit(fmid)
        hi = np.where(take_left, mid, hi)
        lo = np.where(take_left, lo, mid)
        flo = np.where(take_left, flo, fmid)
    return 0.5 * (lo + hi)


def _scan_interval(t0: float, t1: float, step: float) -> np.ndarray:
    """Zeros of Z in [t0, t1] found on a grid of the given step."""
    grid = np.arange(t0, t1 + step, step)
    if grid.size < 2:
        return np.empty(0)
    z = hardy_z(grid)
    flips = np.flatnonzero(np.signbit(z[:-1]) != np.signbit(z[1:]))
    if flips.size == 0:
        return np.empty(0)
    return _bisect_roots(grid[flips], grid[flips + 1])


def mean_zero_gap(t: float) -> float:
    return _TWO_PI / math.log(max(t, 10.0) / _TWO_PI)


def _dedupe(zeros: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Sort and drop near-duplicates (re-found brackets agree to ~1e-12,
    genuine close pairs stay > 1e-2 apart at these heights)."""
    zeros = np.sort(zeros)
    if zeros.size < 2:
        return zeros
    keep = np.concatenate(([True], np.diff(zeros) > tol))
    return zeros[keep]


def zero_count_estimate(T: float) -> float:
    """Smooth zero-counting estimate (T/2pi) log(T/(2 pi e)) + 7/8."""
    return T / _TWO_PI * math.log(T / (_TWO_PI * math.e)) + 7.0 / 8.0


def _t_for_count(count: int) -> float:
    t = max(30.0, 2.0 * count)
    for _ in range(60):
        f = zero_count_estimate(t) - count
        df = math.log(t / _TWO_PI) / _TWO_PI
        t -= f / df
    return t


def generate_zeros(count: int, oversample: int = 10) -> np.ndarray:
    """First `count` positive ordinates of zeta zeros, ascending.

    Grid-scan blocks sized to the local mean gap, bisect each sign change,
    then rescan any suspiciously wide gap at 25x resolution (and once more at
    625x) to dig out close pairs the coarse grid stepped over.
    """
    count = int(count)
    if count < 1:
        raise DomainError("need count >= 1")
    t_end = _t_for_count(count + max(20, count // 1000)) + 30.0
    found: list[np.ndarray] = []
    t0 = 10.0
    while t0 < t_end:
        t1 = min(t_end, t0 + max(200.0, min(2000.0, t0)))
        step = mean_zero_gap(t1) / oversample
        # grid ends exactly where the next block starts: brackets never
        # straddle a block boundary unseen, and never get scanned twice
        n_steps = int(math.ceil((t1 - t0) / step))
        grid = t0 + step * np.arange(n_steps + 1)
        z = hardy_z(grid)
        flips = np.flatnonzero(np.signbit(z[:-1]) != np.signbit(z[1:]))
        if flips.size:
            found.append(_bisect_roots(grid[flips], grid[flips + 1]))
        t0 = float(grid[-1])
    zeros = _dedupe(np.concatenate(found))

    for refine_factor in (25.0, 625.0):
        gaps = np.diff(zeros)
        local_mean = np.array([mean_zero_gap(t) for t in zeros[:-1]])
        wide = np.flatnonzero(gaps > 1.7 * local_mean)
        if wide.size == 0:
            break
        extra = []
        for i in wide.tolist():
            a, b = zeros[i], zeros[i + 1]
            step = mean_zero_gap(b) / (oversample * refine_factor)
            pts = _scan_interval(a + step, b - step, step)
            if pts.size:
                extra.append(pts)
        if not extra:
            break
        zeros = _dedupe(np.concatenate([zeros] + extra))

    zeros = zeros[zeros > 10.5]
    if zeros.size < count:
        raise RuntimeError(
            f"scan found {zeros.size} ordinates below t={t_end:.1f}, needed {count}"
        )
    return zeros[:count]


def write_zeros_file(path, ordinates: np.ndarray, comment: str | None = None) -> None:
    """Plain-text dataset: one ascending ordinate per line, '#' comments."""
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(f"# {len(ordinates)} ordinates, ascending\n")
        for g in np.asarray(ordinates, dtype=np.float64):
            fh.write(f"{g:.9f}\n")
