import math
from fractions import Fraction

import numpy as np
import pytest

from lia.diophantine import primes_up_to
from lia.network import ChannelMatrix
from lia.rates import (
    db_to_linear,
    default_p_max,
    dependent_message_prob,
    dof_benchmark,
    dof_ratio_scan,
    normalized_rate,
    omega_breakdown,
    random_sym_capacity,
    rate_for_p,
    theorem1_rate,
    theorem2_sym_rate,
    time_sharing_sum_rate,
)

SQRT2_OVER_2 = math.sqrt(2) / 2


def brute_dependent_prob(p, k):
    """Exhaustive count of dependent vector pairs in Z_p^k.

    Dependence is tested by scanning all (a, b) != (0, 0) with
    a*w1 + b*w2 = 0, independently of the library's rank shortcut.
    """
    vectors = [np.array(v) for v in np.ndindex(*([p] * k))]
    coeffs = [(a, b) for a in range(p) for b in range(p) if (a, b) != (0, 0)]
    dependent = 0
    for w1 in vectors:
        for w2 in vectors:
            if any(np.all((a * w1 + b * w2) % p == 0) for a, b in coeffs):
                dependent += 1
    return Fraction(dependent, len(vectors) ** 2)


class TestOmegaBreakdown:
    def test_hand_values(self):
        bd = omega_breakdown(3, 0.4, 100.0)
        # 1/9 + sqrt(2*pi/300) + (1/3) exp(-(300/18)*0.04) + 2 exp(-37.5)
        assert bd.omega_a == pytest.approx(0.426970, abs=1e-6)
        assert bd.omega_b == pytest.approx(1.056935, abs=1e-6)

    def test_b_equals_c_exactly(self):
        for g in (0.4, SQRT2_OVER_2, Fraction(6, 25)):
            bd = omega_breakdown(5, g, 321.0)
            assert bd.omega_b == bd.omega_c

    def test_high_snr_limits(self):
        bd = omega_breakdown(7, 0.3, 1e18)
        assert bd.omega_a == pytest.approx(1 / 49, rel=1e-6)
        assert bd.omega_b == pytest.approx(1 / 7, rel=1e-6)

    def test_annihilated_delta_gives_infinite_b(self):
        bd = omega_breakdown(5, Fraction(1, 3), 100.0)
        assert math.isinf(bd.omega_b)
        assert bd.omega_d >= bd.omega_b or math.isinf(bd.omega_d)

    def test_all_terms_positive(self):
        bd = omega_breakdown(11, 0.37, 50.0)
        for v in (bd.omega_a, bd.omega_b, bd.omega_c, bd.omega_d):
            assert v > 0


class TestRateForP:
    def test_unit_snr_always_zero(self):
        for p in (2, 3, 11, 101):
            for g in (0.1, 0.4, SQRT2_OVER_2):
                assert rate_for_p(p, g, 1.0) == 0.0

    def test_moderate_snr_zero_at_p3(self):
        # omega_b > 1 at SNR = 100, gamma = 0.4
        assert rate_for_p(3, 0.4, 100.0) == 0.0

    def test_high_snr_positive(self):
        assert rate_for_p(3, 0.4, 1e6) > 0.0

    def test_never_negative(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            p = int(rng.choice([2, 3, 5, 7, 11, 31]))
            g = float(rng.uniform(0, 1))
            snr = float(10 ** rng.uniform(-1, 12))
            assert rate_for_p(p, g, snr) >= 0.0


class TestTheorem1:
    def test_half_gain_empty_set(self):
        rp = theorem1_rate(0.5, 1e4)
        assert rp.rate == 0.0 and rp.p_star is None and rp.breakdown is None

    def test_rational_gain_saturates(self):
        for snr in (1e2, 1e6, 1e12, 1e20):
            rp = theorem1_rate(Fraction(1, 3), snr)
            assert rp.rate < math.log2(3)

    def test_dof_trend_two_points(self):
        lo = theorem1_rate(SQRT2_OVER_2, 1e4)
        hi = theorem1_rate(SQRT2_OVER_2, 1e12)
        assert 0.0 < hi.rate < 0.5 * math.log2(1 + 1e12)
        ratio_lo = lo.rate / (0.25 * math.log2(1e4))
        ratio_hi = hi.rate / (0.25 * math.log2(1e12))
        assert ratio_hi >= ratio_lo

    def test_matches_brute_force_maximization(self):
        gains = [0.4, SQRT2_OVER_2, 0.49, Fraction(1, 3), Fraction(6, 25)]
        for g in gains:
            for snr in (1e2, 1e4, 1e8):
                best_rate, best_p = 0.0, None
                for p in primes_up_to(101).tolist():
                    r = rate_for_p(int(p), g, snr)
                    if r > best_rate:
                        best_rate, best_p = r, int(p)
                rp = theorem1_rate(g, snr, 101)
                assert rp.rate == pytest.approx(best_rate, abs=1e-9)
                assert rp.p_star == best_p

    def test_breakdown_is_at_p_star(self):
        rp = theorem1_rate(SQRT2_OVER_2, 1e4)
        bd = omega_breakdown(rp.p_star, SQRT2_OVER_2, 1e4)
        assert rp.breakdown.omega_a == pytest.approx(bd.omega_a, rel=1e-9)
        assert rp.breakdown.omega_b == pytest.approx(bd.omega_b, rel=1e-9)

    def test_rejects_nonpositive_snr(self):
        with pytest.raises(ValueError):
            theorem1_rate(0.4, 0.0)


class TestRandomSymCapacity:
    def test_zero_gain(self):
        assert random_sym_capacity(0.0, 123.0) == 0.0

    def test_unit_gain_unit_snr(self):
        assert random_sym_capacity(1.0, 1.0) == pytest.approx(0.25 * math.log2(3))

    def test_sum_constraint_binds_at_high_snr(self):
        snr = 1e12
        assert random_sym_capacity(1.0, snr) == pytest.approx(
            0.25 * math.log2(1 + 2 * snr)
        )


class TestNormalizedRate:
    def test_half_gain_zero(self):
        assert normalized_rate(0.5, 1e4) == 0.0

    def test_zero_gain_zero_by_convention(self):
        assert normalized_rate(0.0, 1e4) == 0.0

    def test_sweep_below_one(self):
        for g in np.arange(0.05, 0.5, 0.05):
            assert normalized_rate(round(float(g), 2), 1e4) <= 1.0


class TestTheorem2:
    def test_symmetric_collapse(self):
        g = SQRT2_OVER_2
        cross = np.array([[0, 1, 2], [3, 0, 1], [2, 2, 0]], dtype=np.int64)
        H = ChannelMatrix(K=3, direct=(g, g, g), cross=cross)
        for snr in (1e4, 1e10):
            rp2 = theorem2_sym_rate(H, snr)
            rp1 = theorem1_rate(g, snr)
            assert rp2.rate == rp1.rate
            assert rp2.p_star == rp1.p_star

    def test_any_half_diagonal_kills_rate(self):
        cross = np.array([[0, 1], [1, 0]], dtype=np.int64)
        H = ChannelMatrix(K=2, direct=(SQRT2_OVER_2, 0.5), cross=cross)
        assert theorem2_sym_rate(H, 1e10).rate == 0.0

    def test_rejects_non_integer_cross(self):
        with pytest.raises(ValueError):
            theorem2_sym_rate([[0.7, 1.5], [2, 0.7]], 1e4)

    def test_min_over_receivers(self):
        cross = np.array([[0, 1], [1, 0]], dtype=np.int64)
        g_good, g_poor = SQRT2_OVER_2, 0.49
        both = ChannelMatrix(K=2, direct=(g_good, g_poor), cross=cross)
        snr = 1e10
        r_both = theorem2_sym_rate(both, snr).rate
        assert r_both <= theorem1_rate(g_good, snr).rate
        assert r_both <= max(
            theorem1_rate(g_poor, snr).rate, theorem1_rate(g_good, snr).rate
        )


class TestBaselines:
    def test_time_sharing_values(self):
        assert time_sharing_sum_rate(3, 0.0) == 0.0
        assert time_sharing_sum_rate(5, 3.0) == pytest.approx(1.0)
        assert time_sharing_sum_rate(2, 15.0) == pytest.approx(2.0)

    def test_dof_benchmark_values(self):
        assert dof_benchmark(5, 0.0, 3.0) == pytest.approx(2.5)
        assert dof_benchmark(2, 0.0, 0.0) == 0.0
        h = SQRT2_OVER_2
        assert dof_benchmark(5, h, 1e4) == pytest.approx(
            2.5 * 0.5 * math.log2(1 + 1.5 * 1e4)
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            time_sharing_sum_rate(0, 1.0)
        with pytest.raises(ValueError):
            dof_benchmark(0, 0.3, 1.0)


class TestDofRatioScan:
    def test_irrational_gain_trend(self):
        scan = dof_ratio_scan(SQRT2_OVER_2, [1e4, 1e8, 1e12])
        ratios = [r for _, r in scan]
        assert all(b >= a for a, b in zip(ratios, ratios[1:]))

    def test_rational_gain_ratio_vanishes(self):
        scan = dof_ratio_scan(Fraction(1, 3), [1e4, 1e20])
        assert scan[-1][1] < 0.1  # rate capped at log2(3), denominator grows

    def test_below_threshold_zero(self):
        scan = dof_ratio_scan(SQRT2_OVER_2, [1.0, 4.0])
        assert scan[0][1] == 0.0 and scan[1][1] == 0.0

    def test_requires_ascending_grid(self):
        with pytest.raises(ValueError):
            dof_ratio_scan(0.4, [1e4, 1e4])


class TestDependentMessageProb:
    def test_exact_values(self):
        assert dependent_message_prob(3, 2) == Fraction(11, 27)
        assert dependent_message_prob(2, 1) == 1
        assert dependent_message_prob(5, 6) < Fraction(1, 1000)

    def test_matches_exhaustive_enumeration(self):
        for p in (2, 3, 5):
            for k in (1, 2, 3):
                assert dependent_message_prob(p, k) == brute_dependent_prob(p, k)

    def test_validation(self):
        with pytest.raises(ValueError):
            dependent_message_prob(4, 2)
        with pytest.raises(ValueError):
            dependent_message_prob(3, 0)


class TestSaturationSweep:
    def test_reduced_fractions_stay_below_log_q(self):
        # subset of the q <= 50 family; the acceptance suite runs the
        # spec-pinned gains over the full 0..200 dB sweep
        for q in (3, 7, 12, 20):
            for r in range(1, q):
                g = Fraction(r, q)
                if g.denominator != q:
                    continue
                for snr in (1e2, 1e6, 1e12, 1e20):
                    assert theorem1_rate(g, snr).rate < math.log2(q)


class TestHelpers:
    def test_db_to_linear(self):
        assert db_to_linear(0.0) == 1.0
        assert db_to_linear(20.0) == pytest.approx(100.0)

    def test_db_to_linear_rejects_overflow_and_nonfinite(self):
        with pytest.raises(ValueError):
            db_to_linear(4000.0)
        with pytest.raises(ValueError):
            db_to_linear(math.inf)

    def test_nonfinite_snr_rejected(self):
        with pytest.raises(ValueError):
            theorem1_rate(0.4, math.inf)
        with pytest.raises(ValueError):
            default_p_max(math.nan)

    def test_default_p_max_rule(self):
        assert default_p_max(1.0) == 101
        assert default_p_max(1e4) == 101
        assert default_p_max(1e8) == 10_000
        assert default_p_max(1e20) == 100_000
