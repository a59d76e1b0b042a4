import math

import numpy as np
import pytest

from hopbound.channel import HopChannel
from hopbound.exponents import random_coding_exponent
from hopbound.oracle import (GridSpec, bsc_ensemble_error,
                             exhaustive_allocation, grid_max_exponent)

SNR1 = HopChannel.awgn(1.0)


class TestGridMax:
    def test_capacity_edge(self):
        val, rho = grid_max_exponent(math.log(2.0), SNR1, GridSpec(0.0, 1.0, 1e-4))
        assert val == pytest.approx(0.0, abs=1e-8)
        assert rho == pytest.approx(0.0, abs=1e-3)

    def test_clamped_regime(self):
        val, rho = grid_max_exponent(0.1, SNR1, GridSpec(0.0, 1.0, 1e-6))
        assert val == pytest.approx(math.log(1.5) - 0.1, abs=1e-9)
        assert rho == pytest.approx(1.0, abs=1e-5)

    def test_sphere_packing_dominance_at_low_rate(self):
        rc_val, _ = grid_max_exponent(0.05, SNR1, GridSpec(0.0, 1.0, 1e-4))
        sp_val, sp_rho = grid_max_exponent(0.05, SNR1, GridSpec(0.0, 50.0, 1e-4))
        assert sp_val > rc_val
        assert sp_rho > 1.0

    def test_invalid_grid(self):
        with pytest.raises(ValueError):
            GridSpec(1.0, 0.5, 1e-3)
        with pytest.raises(ValueError):
            GridSpec(0.0, 1.0, 0.0)


class TestExhaustiveAllocation:
    def test_known_optimum(self):
        best = exhaustive_allocation([0.2, 0.1], 60)
        val = sum(math.exp(-b * e) for b, e in zip(best, [0.2, 0.1]))
        for q1 in range(1, 60):
            other = math.exp(-q1 * 0.2) + math.exp(-(60 - q1) * 0.1)
            assert val <= other + 1e-18

    def test_symmetry(self):
        assert exhaustive_allocation([0.4, 0.4], 10) == [5, 5]

    def test_mass_shifts_to_weak_hop(self):
        best = exhaustive_allocation([1.0, 0.01], 20)
        assert best[1] > best[0]

    def test_instance_bounds_enforced(self):
        with pytest.raises(ValueError):
            exhaustive_allocation([0.1, 0.2], 61)
        with pytest.raises(ValueError):
            exhaustive_allocation([0.1] * 4, 20)


class TestBscEnsemble:
    def test_noiseless_channel_zero_error(self):
        # with distinct codewords ML decoding is exact at p = 0
        mean, stderr = bsc_ensemble_error(6, 2, 0.0, trials=50, seed=3)
        assert mean <= 0.05  # duplicate codewords occur with prob 2^-6 per trial
        assert stderr >= 0.0

    def test_useless_channel(self):
        mean, _ = bsc_ensemble_error(4, 2, 0.5, trials=20, seed=1)
        assert mean >= 0.5
        assert mean <= 1.0

    def test_random_coding_bound_holds(self):
        q, m, p = 8, 4, 0.05
        rate = math.log(m) / q
        e_r = random_coding_exponent(rate, HopChannel.bsc(p)).exponent
        bound = math.exp(-q * e_r)
        mean, stderr = bsc_ensemble_error(q, m, p, trials=2000, seed=1)
        assert mean <= bound + 3 * stderr

    def test_deterministic_given_seed(self):
        a = bsc_ensemble_error(6, 4, 0.1, trials=100, seed=9)
        b = bsc_ensemble_error(6, 4, 0.1, trials=100, seed=9)
        assert a == b

    def test_instance_bounds_enforced(self):
        with pytest.raises(ValueError):
            bsc_ensemble_error(11, 4, 0.1, trials=10, seed=1)
        with pytest.raises(ValueError):
            bsc_ensemble_error(8, 9, 0.1, trials=10, seed=1)

    def test_exact_against_direct_enumeration(self):
        # one fixed codebook, tiny instance: compare with a slow direct count
        q, m, p = 4, 2, 0.2
        rng = np.random.default_rng([5, 0])
        code = rng.integers(0, 2, size=(m, q), dtype=np.uint8)
        total_correct = 0.0
        for y in range(2 ** q):
            ybits = [(y >> k) & 1 for k in range(q)]
            liks = []
            for cw in code:
                d = sum(int(b != c) for b, c in zip(ybits, cw))
                liks.append(p ** d * (1 - p) ** (q - d))
            top = max(liks)
            winners = [k for k, v in enumerate(liks) if v == top]
            if len(winners) == 1:
                total_correct += liks[winners[0]]
        expected_pe = 1.0 - total_correct / m
        mean, _ = bsc_ensemble_error(q, m, p, trials=1, seed=5)
        assert mean == pytest.approx(expected_pe, abs=1e-14)
