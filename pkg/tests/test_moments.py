import math

import numpy as np
import pytest

from primelab import moments as mm
from primelab.singular import B_CONSTANT, TupleSet, pair_sum_expansion
from primelab.sieve import sieve_range, summatory, von_mangoldt
from primelab.util import DomainError


def test_tuple_count_examples():
    assert mm.tuple_count(TupleSet.of(0, 2), 100) == 8
    assert mm.tuple_count(TupleSet.of(0), 10) == 4
    assert mm.tuple_count(TupleSet.of(0, 2, 6), 100) == 4


def test_tuple_count_brute_force():
    bits = sieve_range(0, 1100).bits
    for offsets in ((0, 2), (0, 4), (0, 2, 6), (0, 6, 12)):
        H = TupleSet(offsets)
        brute = sum(
            1 for n in range(1, 1001) if all(bits[n + h] for h in offsets)
        )
        assert mm.tuple_count(H, 1000) == brute


def test_lambda_tuple_sum_is_psi_for_singleton():
    assert mm.lambda_tuple_sum(TupleSet.of(0), 10) == pytest.approx(
        summatory(10).psi_x, rel=1e-12
    )


def test_lambda_tuple_sum_adjacent_prime_powers():
    val = mm.lambda_tuple_sum(TupleSet.of(0, 1), 10**4)
    brute = sum(
        von_mangoldt(n) * von_mangoldt(n + 1) for n in range(1, 10**4 + 1)
    )
    assert val == pytest.approx(brute, rel=1e-10)
    assert val < 50.0


def test_tuple_prediction_values():
    pred = mm.tuple_count_prediction(TupleSet.of(0, 2), 10**8, 10**6)
    assert pred.literal == pytest.approx(1.3203 * 1e8 / math.log(1e8) ** 2, rel=1e-4)
    zero = mm.tuple_count_prediction(TupleSet.of(0, 1), 100)
    assert zero.vanishes and zero.literal == 0.0


def test_twin_count_vs_refined_prediction():
    count = mm.tuple_count(TupleSet.of(0, 2), 10**7)
    assert count == 58980
    pred = mm.tuple_count_prediction(TupleSet.of(0, 2), 10**7, 10**6)
    assert 0.95 <= count / pred.integral <= 1.05


def test_surjection_counts():
    assert mm.surjection_count(2, 1) == 1
    assert mm.surjection_count(2, 2) == 2
    assert mm.surjection_count(3, 2) == 6
    for r in (1, 3, 5, 8):
        assert mm.surjection_count(r, r) == math.factorial(r)
    with pytest.raises(DomainError):
        mm.surjection_count(2, 3)


@pytest.mark.parametrize("N,h,r", [(10**4, 20, 2), (10**3, 10, 3), (500, 6, 4), (200, 5, 1)])
def test_moment_decomposition_identity(N, h, r):
    rep = mm.moment_decomposition(N, h, r)
    assert rep.exact_equal
    assert rep.direct == pytest.approx(rep.reconstructed, rel=1e-12)


def test_variance_report_structure():
    rep = mm.psi_window_variance(10**5, 50)
    m1 = rep.pieces["window_pow1_mean"]
    m2 = rep.pieces["window_pow2_mean"]
    recombined = m2 - 2 * 50 * m1 + 50 * 50
    assert rep.empirical == pytest.approx(recombined, rel=1e-6)
    assert rep.predicted == pytest.approx(50 * (math.log(10**5 / 50) + B_CONSTANT - 1))
    assert rep.cramer_prediction == pytest.approx(50 * math.log(10**5))


def test_variance_degenerate_window():
    rep = mm.psi_window_variance(100, 0)
    assert rep.empirical == 0.0


def test_moment_r2_matches_variance():
    v = mm.psi_window_variance(10**5, 30)
    m = mm.psi_window_moment(10**5, 30, 2)
    assert v.empirical == pytest.approx(m.empirical, rel=1e-12)


def test_mean_window_centering():
    # (1/N) sum (psi(n+h) - psi(n)) should sit near h
    rep = mm.psi_window_moment(10**6, 300, 1)
    assert abs(rep.pieces["window_pow1_mean"] - 300) < 300 * 1e-2


def test_gaussian_moment_recursion():
    # predicted even moments obey mu_r = (r-1) mu_{r-2} scale
    N, h = 10**6, 100
    scale = h * math.log(N / h)
    preds = {r: mm.psi_window_moment(100, 10, r).predicted for r in (2, 4, 6)}
    # recompute on a fixed scale directly (values at small N are noisy, the
    # recursion is about the prediction formula itself)
    mu = {r: mm._double_factorial(r - 1) * scale ** (r // 2) for r in (2, 4, 6)}
    assert mu[4] == pytest.approx(3 * mu[2] * scale, rel=1e-12)
    assert mu[6] == pytest.approx(5 * mu[4] * scale, rel=1e-12)
    assert preds[2] >= 0 and preds[4] >= 0 and preds[6] >= 0


def test_distinct_sum_centered_identity_and_band():
    res = mm.distinct_tuple_sum_centered(2, 10**3)
    oracle = mm.pair_centered_oracle(10**3)
    assert res.exact == pytest.approx(oracle, rel=1e-9)
    assert res.exact < 0 and res.predicted < 0
    assert abs(res.exact - res.predicted) <= 0.15 * abs(res.predicted)


def test_distinct_sum_centered_k3_smallness():
    res = mm.distinct_tuple_sum_centered(3, 50)
    assert abs(res.exact) <= res.normalization  # (h log h)^{3/2}


def test_distinct_sum_identity_with_pair_expansion():
    h = 10**3
    res = mm.distinct_tuple_sum(2, h, 10**4)
    pair = pair_sum_expansion(h, 10**4)  # the l = h term carries weight zero
    assert res.exact == pytest.approx(2.0 * pair.exact, rel=1e-9)


def test_distinct_sum_prediction_bands():
    res2 = mm.distinct_tuple_sum(2, 10**3)
    assert abs(res2.exact - res2.predicted) <= 10.0 * 10**3 ** 0.6 * 2
    res3 = mm.distinct_tuple_sum(3, 60)
    assert 0.9 <= res3.exact / res3.predicted <= 1.1
