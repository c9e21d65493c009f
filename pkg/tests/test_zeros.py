import math

import mpmath
import numpy as np
import pytest

from primelab import zerogen
from primelab import zeros as zl
from primelab.sieve import summatory_many
from primelab.util import DomainError


@pytest.fixture(scope="module")
def table(zeros_100k_path):
    return zl.load_zeros(zeros_100k_path)


@pytest.fixture(scope="module")
def small_table(zeros_2k_path):
    return zl.load_zeros(zeros_2k_path)


def test_first_zeros_against_mpmath(small_table):
    ref = [float(mpmath.zetazero(k).imag) for k in range(1, 11)]
    assert np.max(np.abs(small_table.ordinates[:10] - np.asarray(ref))) < 1e-6


def test_first_zero_by_sign_change(small_table):
    # local sign change of the Hardy function brackets the first ordinate
    g1 = float(small_table.ordinates[0])
    lo, hi = g1 - 1e-4, g1 + 1e-4
    zlo, zhi = zerogen.hardy_z([lo, hi])
    assert np.sign(zlo) != np.sign(zhi)


def test_load_rejects_descending(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("10\n9\n")
    with pytest.raises(DomainError, match="line|2"):
        zl.load_zeros(p)


def test_load_rejects_nonpositive_and_junk(tmp_path):
    p = tmp_path / "neg.txt"
    p.write_text("-3.0\n")
    with pytest.raises(DomainError):
        zl.load_zeros(p)
    p2 = tmp_path / "junk.txt"
    p2.write_text("14.1\nhello\n")
    with pytest.raises(DomainError, match="junk.txt:2"):
        zl.load_zeros(p2)
    p3 = tmp_path / "empty.txt"
    p3.write_text("# nothing\n")
    with pytest.raises(DomainError):
        zl.load_zeros(p3)


def test_load_rejects_wrong_density(tmp_path):
    p = tmp_path / "sparse.txt"
    p.write_text("".join(f"{g}\n" for g in np.arange(14.0, 200.0, 12.0)))
    with pytest.raises(DomainError, match="density"):
        zl.load_zeros(p)


def test_zero_count_at_100(table):
    chk = zl.zero_count_check(table, 100.0)
    assert chk.observed == 29
    assert chk.predicted == pytest.approx(29.0, abs=0.1)
    assert abs(chk.observed - chk.predicted) / chk.predicted < 0.05


def test_zero_count_below_first_zero(table):
    assert zl.zero_count_check(table, 10.0).observed == 0


def test_zero_count_near_table_top(table):
    chk = zl.zero_count_check(table, table.t_max)
    assert abs(chk.observed - chk.predicted) / chk.predicted < 0.02


def test_psi_explicit_empty_sum_is_x(table):
    assert zl.psi_explicit(2.0, 0.0, table) == 2.0
    assert zl.psi_explicit(777.5, 0.0, table) == 777.5


def test_psi_explicit_accuracy(table):
    snap = summatory_many([1000])[0]
    pe = zl.psi_explicit(1000.5, table.t_max, table)
    assert abs(pe - snap.psi_x) / snap.psi_x < 0.005


def test_psi_explicit_monotone_refinement(table):
    xs = np.unique(np.round(np.geomspace(1e3, 1e4, 32)).astype(int))
    snaps = summatory_many(xs.tolist())
    errs = {}
    for T in (500.0, 5000.0):
        errs[T] = np.mean(
            [
                abs(zl.psi_explicit(x + 0.5, T, table) - s.psi_x)
                for x, s in zip(xs, snaps)
            ]
        )
    assert errs[5000.0] <= errs[500.0]


def test_zero_sum_imaginary_parts_cancel(table):
    c = zl.psi_explicit_zero_sum_complex(1000.5, 2000.0, table)
    assert abs(c.imag) < 1e-10


def test_theta_psi_bias_direction():
    xs = [10**3, 10**4, 10**5, 10**6, 10**7, 10**8]
    snaps = summatory_many(xs)
    from primelab.sieve import log_integral

    for x, s in zip(xs, snaps):
        assert s.psi_x - s.theta_x >= math.sqrt(x) * 0.5
        assert s.pi_x < log_integral(float(x))


def test_window_variance_zeros_trivial(table):
    assert zl.window_variance_zeros(500.0, 500.0, table).value == 0.0


def test_window_variance_zeros_bound_and_direct(table):
    wv = zl.window_variance_zeros(1e6, 1e3, table)
    assert wv.ratio_to_bound <= 10.0
    xs = np.linspace(1e6, 2e6, 16).astype(int)
    pts = sorted(set(xs.tolist()) | set((xs + 1000).tolist()))
    snaps = {s.x: s for s in summatory_many(pts)}
    direct = float(
        np.mean([(snaps[x + 1000].psi_x - snaps[x].psi_x - 1000) ** 2 for x in xs])
    )
    assert 0.2 <= direct / wv.value <= 5.0


def test_cosine_moment_k2(table):
    res = zl.cosine_sum_moment(1e4, 100.0, 2, table)
    assert res.zeros_used == 29
    # deterministic value: the off-diagonal pairs push the ratio to 1.3004
    assert res.empirical / res.predicted == pytest.approx(1.30037, abs=2e-4)
    assert 0.7 <= res.empirical / res.predicted <= 1.35


def test_cosine_moment_k1_small(table):
    res = zl.cosine_sum_moment(1e4, 100.0, 1, table)
    assert abs(res.normalized) < 0.2


def test_cosine_moment_refuses_small_X(table):
    with pytest.raises(DomainError, match="constraint"):
        zl.cosine_sum_moment(100.0, 100.0, 2, table)


def test_cosine_moment_no_zeros(table):
    assert zl.cosine_sum_moment(100.0, 5.0, 2, table).empirical == 0.0


def test_bias_sim_symmetry_and_variance(table):
    res = zl.chebyshev_bias_sim(table, 4096, 7, T=2000.0)
    assert res.symmetry_z <= 3.0
    assert res.variance == pytest.approx(res.predicted_variance, rel=0.15)


def test_bias_sim_single_zero_arcsine(small_table):
    one = zl.zero_table_from_array(small_table.ordinates[:1])
    res = zl.chebyshev_bias_sim(one, 8192, 3)
    g = float(one.ordinates[0])
    M = 1.0 / math.hypot(0.5, g)
    draws = res.draws
    assert np.max(np.abs(draws)) <= M + 1e-12
    # arcsine quantiles: CDF(t) = 1 - arccos(t/M)/pi
    for q in (0.25, 0.5, 0.75):
        expected = -M * math.cos(math.pi * q)
        assert np.quantile(draws, q) == pytest.approx(expected, abs=0.05 * M)
