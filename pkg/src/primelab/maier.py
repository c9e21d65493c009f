"""Maier-matrix double counting and the uncertainty framework.

Moduli built from many small primes are kept as factored prime sets; the
integer P itself is never needed, only phi(P)/P, log P, d(P) and coprimality.
Exact coprime counts run over the Moebius-signed divisors d <= h (squarefree
products of the modulus primes), so h up to the 1e10 contract bound costs
thousands of terms, not h of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .gaps import Histogram, make_histogram
from .sieve import (
    _distinct_prime_factors,
    euler_phi,
    is_prime,
    iter_segments,
    primes_upto,
    sieve_range,
    two_squares_range,
)
from .singular import occupied_residues, TupleSet
from .util import CapacityError, DomainError, rng_from_seed
from .zetafn import zeta

COUNT_RANGE_GUARD = 10**10  # contract bound for exact coprime counting
_DIVISOR_GUARD = 5 * 10**7


@dataclass(frozen=True)
class FactoredModulus:
    """A squarefree modulus known only through its sorted prime set."""

    primes: tuple[int, ...]
    log_P: float
    phi_ratio: float
    divisor_count: int
    divisor_count_saturated: bool  # 2^m beyond 2^63

    @classmethod
    def from_primes(cls, ps) -> "FactoredModulus":
        ps = tuple(sorted({int(p) for p in ps}))
        for p in ps:
            if not is_prime(p):
                raise DomainError(f"{p} is not prime")
        m = len(ps)
        return cls(
            ps,
            float(sum(math.log(p) for p in ps)),
            float(np.prod([1.0 - 1.0 / p for p in ps])) if ps else 1.0,
            1 << m,
            m >= 63,
        )

    @property
    def n_primes(self) -> int:
        return len(self.primes)

    def phi_over_p(self) -> Fraction:
        out = Fraction(1)
        for p in self.primes:
            out *= Fraction(p - 1, p)
        return out


def build_modulus_interval(lo: int, hi: int) -> FactoredModulus:
    """All primes in [lo, hi)."""
    lo, hi = int(lo), int(hi)
    if not 2 <= lo < hi:
        raise DomainError("need 2 <= lo < hi")
    ps = primes_upto(hi - 1)
    ps = ps[ps >= lo]
    if ps.size == 0:
        raise DomainError(f"no primes in [{lo}, {hi})")
    return FactoredModulus.from_primes(ps.tolist())


def build_modulus_dyadic_half(y: int, seed: int) -> FactoredModulus:
    """From each dyadic block [y/2^(j+1)... ] down to sqrt(y), keep a random
    half (rounded up) of the primes, seeded."""
    y = int(y)
    if y < 16:
        raise DomainError("need y >= 16")
    rng = rng_from_seed(seed)
    chosen: list[int] = []
    j_max = int(math.log(y) / (2.0 * math.log(2.0)))
    for j in range(j_max + 1):
        hi = y / 2**j
        lo = y / 2 ** (j + 1)
        block = primes_upto(int(math.floor(hi)))
        block = block[block > lo]
        if block.size == 0:
            continue
        take = (block.size + 1) // 2
        pick = rng.choice(block, size=take, replace=False)
        chosen.extend(int(p) for p in pick)
    if not chosen:
        raise DomainError(f"no primes selected below y={y}")
    return FactoredModulus.from_primes(chosen)


# divisor tables keyed by the prime set; rebuilt when a larger bound is asked
_divisor_cache: dict[tuple[int, ...], tuple[int, np.ndarray, np.ndarray]] = {}


def _divisor_table(P: FactoredModulus, bound: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted squarefree divisors d <= bound of the modulus, with mu(d)."""
    key = P.primes
    hit = _divisor_cache.get(key)
    if hit is not None and hit[0] >= bound:
        d, mu = hit[1], hit[2]
        idx = int(np.searchsorted(d, bound, side="right"))
        return d[:idx], mu[:idx]
    ps = sorted(key, reverse=True)  # large primes first prunes fastest
    divisors = [1]
    mobius = [1]
    stack = [(0, 1, 1)]
    while stack:
        i, prod, mu = stack.pop()
        for j in range(i, len(ps)):
            nxt = prod * ps[j]
            if nxt > bound:
                continue
            divisors.append(nxt)
            mobius.append(-mu)
            if len(divisors) > _DIVISOR_GUARD:
                raise CapacityError("divisor enumeration guard exceeded")
            stack.append((j + 1, nxt, -mu))
    order = np.argsort(np.asarray(divisors, dtype=np.int64))
    d = np.asarray(divisors, dtype=np.int64)[order]
    mu = np.asarray(mobius, dtype=np.int64)[order]
    _divisor_cache[key] = (bound, d, mu)
    return d, mu


def coprime_count(P: FactoredModulus, h: int) -> int:
    """Exact #{1 <= j <= h : gcd(j, P) = 1} = sum_{d | P, d <= h} mu(d) floor(h/d)."""
    h = int(h)
    if h < 0:
        raise DomainError("need h >= 0")
    if h == 0:
        return 0
    if h > COUNT_RANGE_GUARD:
        raise CapacityError(f"h = {h} beyond the {COUNT_RANGE_GUARD} counting bound")
    d, mu = _divisor_table(P, h)
    return int(np.sum(mu * (h // d)))


def coprime_count_sieve(P: FactoredModulus, h: int) -> int:
    """Independent oracle: mark multiples of each modulus prime over [1, h]."""
    h = int(h)
    if h > 10**8:
        raise CapacityError("sieve oracle limited to h <= 1e8")
    if h == 0:
        return 0
    ok = np.ones(h + 1, dtype=bool)
    ok[0] = False
    for p in P.primes:
        if p <= h:
            ok[p::p] = False
    return int(np.count_nonzero(ok))


@dataclass(frozen=True)
class CoprimeExcess:
    u: float
    h: int  # floor(y^u)
    value: float  # E(u)
    divisor_bound: float  # d(P) y^(-u), valid scale when 2^m is exact


def coprime_excess(P: FactoredModulus, y: float, u: float) -> CoprimeExcess:
    """E(u) = y^(-u) (#{n <= y^u coprime to P} - floor(y^u) phi(P)/P)."""
    y, u = float(y), float(u)
    if u <= 0 or y <= 1:
        raise DomainError("need y > 1 and u > 0")
    yu = y**u
    if yu > COUNT_RANGE_GUARD:
        raise CapacityError(
            f"y^u = {yu:.3g} beyond the {COUNT_RANGE_GUARD} counting bound"
        )
    h = int(math.floor(yu + 1e-9))
    cnt = coprime_count(P, h)
    excess = (cnt - h * P.phi_ratio) / yu
    return CoprimeExcess(u, h, excess, P.divisor_count / yu)


@dataclass(frozen=True)
class SignScan:
    us: np.ndarray
    values: np.ndarray
    has_positive: bool
    has_negative: bool
    u_reached: float  # last feasible u evaluated


def coprime_excess_sign_scan(
    P: FactoredModulus,
    y: float,
    u_lo: float = 1.0,
    u_hi: float = 6.0,
    step: float = 0.05,
    stop_when_both: bool = False,
) -> SignScan:
    """Scan E(u) on a grid, clipped to the exact-counting feasibility bound."""
    u_cap = math.log(COUNT_RANGE_GUARD) / math.log(y)
    us, vals = [], []
    pos = neg = False
    u = u_lo
    while u <= u_hi + 1e-12 and u <= u_cap:
        e = coprime_excess(P, y, u)
        us.append(u)
        vals.append(e.value)
        pos = pos or e.value > 0
        neg = neg or e.value < 0
        if stop_when_both and pos and neg:
            break
        u += step
    return SignScan(np.asarray(us), np.asarray(vals), pos, neg, us[-1] if us else u_lo)


def zeta_restricted(s: complex, P: FactoredModulus) -> complex:
    """zeta_P(s) = zeta(s) prod_{p | P} (1 - p^(-s)); meromorphic via the product."""
    s = complex(s)
    out = zeta(s)
    for p in P.primes:
        out *= 1.0 - p ** (-s)
    return out


@dataclass(frozen=True)
class CoprimeZetaIdentity:
    s: complex
    lhs: complex
    rhs: complex
    gap: float
    tail_bound: float
    boundary_term: complex


def coprime_zeta_identity(
    s: complex,
    P: FactoredModulus,
    y: float,
    u_max: float,
    tol: float | None = None,
) -> CoprimeZetaIdentity:
    """Check zeta_P(s) = zeta(s) phi(P)/P + s log y * integral_0^inf E(u) y^(-u(s-1)) du.

    The integrand is piecewise constant between integer crossings of y^u, so
    the truncated integral is summed exactly:
        s log y * int_0^U = sum_{n <= Z} g(n) n^(-s) - G(Z) Z^(-s),  Z = y^U,
    with g(n) = [gcd(n,P)=1] - phi(P)/P and G its summatory.  The discarded
    tail obeys |tail| <= |s| d(P) y^(-U Re s) / Re s via |E(u)| <= d(P) y^(-u).
    """
    s = complex(s)
    if s == 1:
        raise DomainError("identity undefined at the pole s = 1")
    if s.real <= 0:
        raise DomainError("need Re(s) > 0")
    y, u_max = float(y), float(u_max)
    Z = int(math.floor(y**u_max + 1e-9))
    if Z > COUNT_RANGE_GUARD:
        raise CapacityError("y^u_max beyond the counting bound")
    tail_bound = abs(s) * P.divisor_count * y ** (-u_max * s.real) / s.real
    if tol is not None and tail_bound > tol:
        raise DomainError(
            f"tail bound {tail_bound:.323g} not controllable below tol={tol} at u_max={u_max}"
        )
    phi_ratio = P.phi_ratio
    real_s = s.imag == 0.0
    total = 0.0 if real_s else complex(0.0)
    coprime_total = 0
    block = 1 << 22
    lo = 1
    while lo <= Z:
        hi = min(Z + 1, lo + block)
        n = np.arange(lo, hi, dtype=np.float64)
        ok = np.ones(hi - lo, dtype=bool)
        for p in P.primes:
            start = ((lo + p - 1) // p) * p
            if start < hi:
                ok[start - lo :: p] = False
        coprime_total += int(np.count_nonzero(ok))
        if real_s:
            pw = n ** (-s.real)
            total += float(np.sum(pw[ok])) - phi_ratio * float(np.sum(pw))
        else:
            pw = np.exp(-s * np.log(n))
            total += complex(np.sum(pw[ok])) - phi_ratio * complex(np.sum(pw))
        lo = hi
    G_Z = coprime_total - Z * phi_ratio
    boundary = G_Z * Z ** (-s)
    rhs = zeta(s) * phi_ratio + total - boundary
    lhs = zeta_restricted(s, P)
    return CoprimeZetaIdentity(s, lhs, rhs, abs(lhs - rhs), tail_bound, boundary)


@dataclass(frozen=True)
class MaierMatrixReport:
    x: int
    h: int
    n_rows: int
    row_counts: np.ndarray  # primes in (nP, nP + h] per row
    column_counts: np.ndarray  # per residue j = 1..h (0 where gcd(j, P) > 1)
    row_total: int
    column_total: int
    row_prediction: float  # (x/P) h / log x
    column_prediction: float  # (x/phi(P)) #{j <= h coprime} / log x
    coprime_columns: int


def maier_matrix(x: int, P: FactoredModulus, h: int) -> MaierMatrixReport:
    """Row-by-row vs column-by-column prime census of the matrix with entries
    (n0 + i) P + j; requires P small enough to materialize."""
    x, h = int(x), int(h)
    if h < 1:
        raise DomainError("need h >= 1")
    P_int = 1
    for p in P.primes:
        P_int *= p
        if P_int > (1 << 62):
            raise CapacityError("modulus too large to materialize as an integer")
    if P_int > x:
        raise DomainError("need P <= x for a nonempty matrix")
    n_lo = -(-x // P_int)  # ceil
    n_hi = (2 * x) // P_int
    if n_hi < n_lo:
        raise DomainError("empty row range")
    lo_entry = n_lo * P_int + 1
    hi_entry = n_hi * P_int + h + 1
    seg = sieve_range(lo_entry, hi_entry, max_span=1 << 31)
    bits = seg.bits
    c = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
    rows = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    starts = rows * P_int  # count primes in (nP, nP + h]
    row_counts = c[starts + h + 1 - lo_entry] - c[starts + 1 - lo_entry]
    n_rows = int(rows.size)
    col_counts = np.zeros(h, dtype=np.int64)
    for j in range(1, h + 1):
        if math.gcd(j, P_int) != 1:
            continue
        first = n_lo * P_int + j
        col_counts[j - 1] = int(np.count_nonzero(bits[first - lo_entry :: P_int][:n_rows]))
    phi_P = euler_phi(P_int)
    cop = coprime_count(P, h)
    return MaierMatrixReport(
        x,
        h,
        n_rows,
        row_counts,
        col_counts,
        int(row_counts.sum()),
        int(col_counts.sum()),
        (x / P_int) * h / math.log(x),
        (x / phi_P) * cop / math.log(x),
        cop,
    )


def inclusion_exclusion_vs_mertens() -> tuple[float, float]:
    """Three-term inclusion-exclusion coefficient vs the Mertens-product
    coefficient 9/10 for primes between (log x)^0.9 and (log x)/100; the
    former is larger by ~1.9e-4."""
    r = math.log(10.0 / 9.0)
    return 1.0 - r + 0.5 * r * r, 9.0 / 10.0


# ---------------------------------------------------------------------------
# arithmetic sequences and the short-interval / progression predictions

@dataclass(frozen=True)
class ArithSequence:
    """Nonnegative weights a(n) with a multiplicative density model h(p^k).

    progression_f, when present, maps (q, a) to the f_q(a) of the progression
    prediction; gamma_q is then prod_{p|q} (p-1)/(p-h(p)).
    """

    kind: str
    weights_upto: Callable[[int], np.ndarray]  # a(n) for n = 0..x
    h_prime_power: Callable[[int, int], float]  # h(p^k)
    progression_f: Callable[[int, int], float] | None = None

    def h_of(self, d: int) -> float:
        d = int(d)
        if d < 1:
            raise DomainError("need d >= 1")
        out = 1.0
        for p in _distinct_prime_factors(d) if d > 1 else []:
            k = 0
            while d % p == 0:
                d //= p
                k += 1
            out *= self.h_prime_power(p, k)
        return out

    def gamma_q(self, q: int) -> float:
        out = 1.0
        for p in _distinct_prime_factors(q) if q > 1 else []:
            hp = self.h_prime_power(p, 1)
            if hp >= p:
                raise DomainError(f"density h({p}) = {hp} >= {p}")
            out *= (p - 1.0) / (p - hp)
        return out


def ones_sequence() -> ArithSequence:
    def w(x: int) -> np.ndarray:
        a = np.ones(x + 1)
        a[0] = 0.0
        return a

    return ArithSequence("ones", w, lambda p, k: 1.0, progression_f=lambda q, a: 1.0)


def primes_sequence() -> ArithSequence:
    def w(x: int) -> np.ndarray:
        return sieve_range(0, x + 1, max_span=1 << 31).bits.astype(np.float64)

    def f(q: int, a: int) -> float:
        return 1.0 if math.gcd(a, q) == 1 else 0.0

    return ArithSequence("primes", w, lambda p, k: 1.0 if k == 0 else 0.0, progression_f=f)


def two_squares_sequence() -> ArithSequence:
    def w(x: int) -> np.ndarray:
        a = two_squares_range(x).astype(np.float64)
        a[0] = 0.0
        return a

    def h(p: int, k: int) -> float:
        if p == 2:
            return 1.0  # ramified prime: not covered by the residue rule
        if pow(p, k, 4) == 1:
            return 1.0
        return 1.0 / p

    # no closed-form progression density model is defined for this sequence
    return ArithSequence("two_squares", w, h, progression_f=None)


def custom_sequence(weights_upto, h_prime_power) -> ArithSequence:
    return ArithSequence("custom", weights_upto, h_prime_power, progression_f=None)


@dataclass(frozen=True)
class DiscrepancyReport:
    scale: str  # 'interval' | 'multiples' | 'progression'
    parameters: dict
    observed: float
    predicted: float | None
    relative_deviation: float | None
    note: str = ""

    EPS = 1e-30

    @staticmethod
    def build(scale: str, parameters: dict, observed: float, predicted: float | None, note=""):
        rel = None
        if predicted is not None:
            rel = abs(observed - predicted) / max(abs(predicted), DiscrepancyReport.EPS)
        return DiscrepancyReport(scale, parameters, observed, predicted, rel, note)


def sequence_summatory(seq: ArithSequence, x: int) -> float:
    """A(x) = sum_{n <= x} a(n)."""
    x = int(x)
    if x < 1:
        raise DomainError("need x >= 1")
    return float(seq.weights_upto(x)[1 : x + 1].sum())


def sequence_multiples(seq: ArithSequence, d: int, x: int) -> DiscrepancyReport:
    """A_d(x) = sum over multiples of d, vs (h(d)/d) A(x)."""
    d, x = int(d), int(x)
    if d < 1 or x < 1:
        raise DomainError("need d >= 1 and x >= 1")
    a = seq.weights_upto(x)
    observed = float(a[d::d].sum())
    predicted = seq.h_of(d) / d * float(a[1:].sum())
    return DiscrepancyReport.build(
        "multiples", {"d": d, "x": x, "kind": seq.kind}, observed, predicted
    )


def sequence_progression(seq: ArithSequence, q: int, a: int, x: int) -> DiscrepancyReport:
    """A(x; q, a) vs f_q(a) / (q gamma_q) A(x) when the model defines f_q."""
    q, a, x = int(q), int(a), int(x)
    if q < 1 or x < 1 or not 0 <= a < q:
        raise DomainError("need q >= 1, 0 <= a < q, x >= 1")
    w = seq.weights_upto(x)
    idx = np.arange(a if a else q, x + 1, q)
    observed = float(w[idx].sum())
    params = {"q": q, "a": a, "x": x, "kind": seq.kind}
    total = float(w[1:].sum())
    if seq.progression_f is None:
        return DiscrepancyReport.build(
            "progression",
            params,
            observed,
            None,
            note=f"no prediction: f_q is undefined for the {seq.kind} sequence; "
            f"empirical density {observed / total:.6g}",
        )
    predicted = seq.progression_f(q, a) / (q * seq.gamma_q(q)) * total
    return DiscrepancyReport.build("progression", params, observed, predicted)


def sequence_interval(seq: ArithSequence, x: int, y: int) -> DiscrepancyReport:
    """A(x + y) - A(x) vs y A(x) / x (the short-interval expectation)."""
    x, y = int(x), int(y)
    if x < 1 or y < 1:
        raise DomainError("need x, y >= 1")
    w = seq.weights_upto(x + y)
    ax = float(w[1 : x + 1].sum())
    observed = float(w[x + 1 : x + y + 1].sum())
    return DiscrepancyReport.build(
        "interval", {"x": x, "y": y, "kind": seq.kind}, observed, y * ax / x
    )


# ---------------------------------------------------------------------------
# reduced-residue gaps and their moments

def residue_gap_distribution(q: int, edges) -> Histogram:
    """Histogram of (a_{i+1} - a_i) phi(q)/q over one period of the reduced
    residues mod q, wrap-around gap included; streamed, exact."""
    q = int(q)
    if q < 3:
        raise DomainError("need q >= 3")
    if q > 10**9:
        raise CapacityError("q beyond the streaming bound 1e9")
    fac = _distinct_prime_factors(q)
    phi = euler_phi(q)
    norm = phi / q
    gaps: list[np.ndarray] = []
    prev = None
    first = None
    for seg_lo in range(0, q + 1, 1 << 22):
        lo = max(1, seg_lo)
        hi = min(q + 1, seg_lo + (1 << 22))
        if lo >= hi:
            continue
        ok = np.ones(hi - lo, dtype=bool)
        for p in fac:
            start = ((lo + p - 1) // p) * p
            if start < hi:
                ok[start - lo :: p] = False
        res = lo + np.flatnonzero(ok)
        if res.size == 0:
            continue
        if first is None:
            first = int(res[0])
        if prev is not None:
            gaps.append(np.asarray([res[0] - prev], dtype=np.float64))
        if res.size > 1:
            gaps.append(np.diff(res).astype(np.float64))
        prev = int(res[-1])
    wrap = first + q - prev
    gaps.append(np.asarray([wrap], dtype=np.float64))
    values = np.concatenate(gaps) * norm
    return make_histogram(values, edges)


@dataclass(frozen=True)
class ReducedResidueMoment:
    q: int
    h: int
    k: int
    direct: float
    oracle: float | None  # k = 2 singular-series route, squarefree q only


def reduced_residue_moment(q: int, h: int, k: int) -> ReducedResidueMoment:
    """M_k(q; h) = sum_{n <= q} (#{l <= h : gcd(n + l, q) = 1} - h phi/q)^k.

    Exact integer/rational arithmetic: with X_n = q W_n - h phi the moment is
    sum X_n^k / q^k.  The k = 2 oracle groups the double sum over l_1 - l_2.
    """
    q, h, k = int(q), int(h), int(k)
    if q < 1 or h < 1:
        raise DomainError("need q, h >= 1")
    if q > 10**6:
        raise CapacityError("direct scan limited to q <= 1e6")
    if k < 1 or k > 4:
        raise DomainError("need 1 <= k <= 4")
    fac = _distinct_prime_factors(q) if q > 1 else []
    phi = euler_phi(q)
    L = q + h + 1
    ok = np.ones(L + 1, dtype=bool)
    ok[0] = False
    for p in fac:
        ok[p::p] = False
    c = np.concatenate(([0], np.cumsum(ok, dtype=np.int64)))
    n = np.arange(1, q + 1)
    W = c[n + h] - c[n]
    X = (q * W - h * phi).tolist()  # exact ints
    direct_num = sum(int(x) ** k for x in X)
    direct = float(Fraction(direct_num, q**k))
    oracle = None
    if k == 2 and math.prod(fac) == q:
        total = 0
        for delta in range(-(h - 1), h):
            prod = 1
            for p in fac:
                nu = 1 if delta % p == 0 else 2
                prod *= p - nu
            total += (h - abs(delta)) * prod
        oracle = float(Fraction(total * q - h * h * phi * phi, q))
    return ReducedResidueMoment(q, h, k, direct, oracle)
