import math

import mpmath
import numpy as np
import pytest

from hopbound.allocation import Allocation, Method, rate_policy_scale
from hopbound.channel import HopChannel, capacity
from hopbound.exponents import random_coding_exponent, sphere_packing_exponent
from hopbound.system import end_to_end_rate, system_error_bounds

R_CR = math.log(1.5) - 1.0 / 6.0


def manual_alloc(blocks, rates):
    alloc = Allocation(list(blocks), list(rates), 0.0, Method.MANUAL)
    return Allocation(list(blocks), list(rates), end_to_end_rate(alloc), Method.MANUAL)


class TestSystemBounds:
    def test_single_hop_collapses_to_per_hop_exponent(self):
        ch = HopChannel.awgn(1.0)
        alloc = manual_alloc([1000], [0.5])
        bounds = system_error_bounds(alloc, [ch])
        e_r = random_coding_exponent(0.5, ch).exponent
        e_sp = sphere_packing_exponent(0.5, ch).exponent
        assert bounds.esys_lower == pytest.approx(e_r, abs=1e-12)
        assert bounds.esys_upper == pytest.approx(e_sp, abs=1e-12)
        assert 0.5 > R_CR
        assert bounds.esys_lower == pytest.approx(bounds.esys_upper, abs=1e-12)

    def test_all_rates_at_capacity_gives_log_n_over_q(self):
        hops = [HopChannel.awgn(1.0), HopChannel.awgn(3.0)]
        rates = [capacity(h) for h in hops]
        alloc = manual_alloc([500, 500], rates)
        bounds = system_error_bounds(alloc, hops)
        assert bounds.esys_lower == pytest.approx(-math.log(2) / 1000, abs=1e-12)
        assert bounds.esys_upper == pytest.approx(-math.log(2) / 1000, abs=1e-12)
        assert bounds.degenerate_hops == [0, 1]

    def test_sum_matches_extended_precision(self):
        hops = [HopChannel.awgn(10 ** 0.9), HopChannel.awgn(10 ** 0.6)]
        alloc = manual_alloc([336, 664], [0.9, 0.7])
        bounds = system_error_bounds(alloc, hops)
        with mpmath.workdps(60):
            exact = sum(
                mpmath.e ** (-q * e)
                for q, e in zip([336, 664], bounds.per_hop_e_r))
            assert bounds.pe_upper == pytest.approx(float(exact), rel=1e-12)
            exact_esys = -mpmath.log(exact) / 1000
            assert bounds.esys_lower == pytest.approx(float(exact_esys), rel=1e-10)

    def test_sandwich_order_on_random_scenarios(self):
        rng = np.random.default_rng(21)
        for _ in range(30):
            n = int(rng.integers(1, 5))
            hops = [HopChannel.awgn(float(10 ** rng.uniform(-0.5, 1.5)))
                    for _ in range(n)]
            caps = [capacity(h) for h in hops]
            rates = [float(rng.uniform(0.2, 0.95)) * c for c in caps]
            blocks = rng.integers(10, 500, size=n).tolist()
            bounds = system_error_bounds(manual_alloc(blocks, rates), hops)
            assert bounds.pe_lower <= bounds.pe_upper + 1e-12
            assert bounds.esys_lower <= bounds.esys_upper + 1e-12

    def test_finite_q_brackets_weighted_min(self):
        hops = [HopChannel.awgn(10 ** 0.9), HopChannel.awgn(10 ** 0.6)]
        rates = rate_policy_scale([capacity(h) for h in hops], 0.5)
        blocks = [400, 600]
        bounds = system_error_bounds(manual_alloc(blocks, rates), hops)
        q = sum(blocks)
        for esys, exps in ((bounds.esys_lower, bounds.per_hop_e_r),
                           (bounds.esys_upper, bounds.per_hop_e_sp)):
            weighted_min = min(b / q * e for b, e in zip(blocks, exps))
            assert weighted_min - math.log(len(hops)) / q - 1e-12 <= esys
            assert esys <= weighted_min + 1e-12

    def test_monotone_in_snr(self):
        rates = [0.5, 0.4]
        blocks = [400, 600]
        lo = [HopChannel.awgn(2.0), HopChannel.awgn(1.5)]
        hi = [HopChannel.awgn(2.5), HopChannel.awgn(2.0)]
        b_lo = system_error_bounds(manual_alloc(blocks, rates), lo)
        b_hi = system_error_bounds(manual_alloc(blocks, rates), hi)
        assert b_hi.esys_lower > b_lo.esys_lower
        assert b_hi.esys_upper > b_lo.esys_upper

    def test_logsumexp_stability_at_huge_exponents(self):
        # Q_n * E_n around 1e8 must not underflow to -inf
        ch = HopChannel.awgn(1e6)
        rate = 0.01
        alloc = manual_alloc([10_000_000, 10_000_000], [rate, rate])
        bounds = system_error_bounds(alloc, [ch, ch])
        e_r = random_coding_exponent(rate, ch).exponent
        assert alloc.blocklengths[0] * e_r > 1e8
        assert math.isfinite(bounds.esys_lower)
        expected = e_r / 2 - math.log(2) / 20_000_000  # lambda_n = 1/2 each
        assert bounds.esys_lower == pytest.approx(expected, rel=1e-9)

    def test_clamped_fields(self):
        hops = [HopChannel.awgn(1.0)]
        rates = [capacity(hops[0])]
        bounds = system_error_bounds(manual_alloc([10], rates), hops)
        assert bounds.pe_upper == pytest.approx(1.0)
        assert bounds.pe_upper_clamped <= 1.0
        assert bounds.pe_lower_clamped <= 1.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            system_error_bounds(manual_alloc([10], [0.1]),
                                [HopChannel.awgn(1.0), HopChannel.awgn(1.0)])


class TestEndToEndRate:
    def test_bottleneck(self):
        assert end_to_end_rate(manual_alloc([10, 20], [2.0, 1.0])) == pytest.approx(
            20.0 / 30.0, abs=1e-12)

    def test_single_hop(self):
        assert end_to_end_rate(manual_alloc([777], [0.31])) == pytest.approx(0.31)

    def test_min_selects_weakest(self):
        assert end_to_end_rate(manual_alloc([500, 500], [1.0, 2.0])) == pytest.approx(0.5)
