import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sscpolar import (
    ChannelKind,
    MinusRule,
    bhattacharyya,
    capacity,
    channel_from_capacity,
    make_channel,
    sample_llrs,
    z_minus,
    z_plus,
)
from sscpolar.channel import LLR_CAP, bsc_llr_magnitude, validate_minus_rule


class TestBhattacharyya:
    def test_bec_equals_erasure_prob(self):
        assert bhattacharyya(ChannelKind.BEC, 0.5) == 0.5

    def test_noiseless_bsc(self):
        assert bhattacharyya(ChannelKind.BSC, 0.0) == 0.0

    def test_bsc_formula(self):
        # 2*sqrt(p(1-p)) at p=0.11, evaluated directly
        assert bhattacharyya(ChannelKind.BSC, 0.11) == pytest.approx(
            0.6257795138864807, abs=1e-15)

    def test_bawgnc_formula(self):
        sigma = 0.7
        assert bhattacharyya(ChannelKind.BAWGNC, sigma) == pytest.approx(
            math.exp(-1 / (2 * sigma ** 2)), abs=1e-15)

    @pytest.mark.parametrize("kind,param", [
        (ChannelKind.BEC, -0.1), (ChannelKind.BEC, 1.1),
        (ChannelKind.BSC, 0.6), (ChannelKind.BSC, -0.01),
        (ChannelKind.BAWGNC, 0.0), (ChannelKind.BAWGNC, -1.0),
    ])
    def test_out_of_range_param(self, kind, param):
        with pytest.raises(ValueError):
            bhattacharyya(kind, param)


class TestCapacity:
    def test_bec(self):
        assert capacity(ChannelKind.BEC, 0.5) == 0.5

    def test_useless_bsc(self):
        assert capacity(ChannelKind.BSC, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_bsc_entropy_value(self):
        # 1 - h2(0.11), direct evaluation
        assert capacity(ChannelKind.BSC, 0.11) == pytest.approx(
            0.500084041835472, abs=1e-12)

    def test_bawgnc_extremes(self):
        assert capacity(ChannelKind.BAWGNC, 0.05) > 0.999
        assert capacity(ChannelKind.BAWGNC, 50.0) < 0.001

    def test_bawgnc_against_hermite_quadrature(self):
        # independent evaluation of 1 - E log2(1 + exp(-2y/s^2)) over N(1, s^2)
        nodes, weights = np.polynomial.hermite.hermgauss(120)
        for sigma in (0.5, 0.9787, 2.0):
            y = 1.0 + math.sqrt(2.0) * sigma * nodes
            loss = (weights * np.logaddexp(0.0, -2.0 * y / sigma ** 2)).sum()
            expected = 1.0 - loss / (math.log(2.0) * math.sqrt(math.pi))
            assert capacity(ChannelKind.BAWGNC, sigma) == pytest.approx(expected, abs=1e-8)

    @pytest.mark.parametrize("kind,grid", [
        (ChannelKind.BEC, np.linspace(0.01, 0.99, 25)),
        (ChannelKind.BSC, np.linspace(0.005, 0.495, 25)),
        (ChannelKind.BAWGNC, np.linspace(0.2, 5.0, 15)),
    ])
    def test_strictly_monotone_in_param(self, kind, grid):
        caps = [capacity(kind, p) for p in grid]
        assert all(a > b for a, b in zip(caps, caps[1:]))


class TestChannelFromCapacity:
    def test_bec_trivial(self):
        assert channel_from_capacity(ChannelKind.BEC, 0.5).param == 0.5
        assert channel_from_capacity(ChannelKind.BEC, 0.9).param == pytest.approx(0.1)

    def test_bsc_half_capacity(self):
        ch = channel_from_capacity(ChannelKind.BSC, 0.5)
        assert ch.param == pytest.approx(0.1100278644, abs=1e-6)

    @pytest.mark.parametrize("kind", list(ChannelKind))
    @pytest.mark.parametrize("target", [0.1, 0.25, 0.5, 0.75, 0.9])
    def test_round_trip(self, kind, target):
        ch = channel_from_capacity(kind, target)
        assert abs(capacity(kind, ch.param) - target) <= 1e-9
        assert abs(ch.capacity - target) <= 1e-9

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
    def test_target_out_of_range(self, bad):
        with pytest.raises(ValueError):
            channel_from_capacity(ChannelKind.BEC, bad)


class TestZTransforms:
    def test_examples(self):
        assert z_minus(0.5) == 0.75
        assert z_minus(0.0) == 0.0
        assert z_minus(1.0) == 1.0
        assert z_plus(0.5) == 0.25
        assert z_plus(1.0) == 1.0
        assert z_plus(0.1) == pytest.approx(0.01, abs=1e-17)

    @given(st.floats(min_value=0.0, max_value=1.0))
    def test_polarization_ordering(self, z):
        assert z_plus(z) <= z <= z_minus(z)

    @given(st.floats(min_value=0.0, max_value=1.0))
    def test_stays_in_unit_interval(self, z):
        assert 0.0 <= z_plus(z) <= 1.0
        assert 0.0 <= z_minus(z) <= 1.0

    def test_exact_bec_rule_rejected_off_bec(self):
        with pytest.raises(ValueError):
            validate_minus_rule(ChannelKind.BSC, MinusRule.EXACT_BEC)
        validate_minus_rule(ChannelKind.BEC, MinusRule.EXACT_BEC)
        validate_minus_rule(ChannelKind.BSC, MinusRule.UPPER_BOUND)


class TestChannelInvariants:
    @pytest.mark.parametrize("kind,param", [
        (ChannelKind.BEC, 0.37), (ChannelKind.BSC, 0.11), (ChannelKind.BAWGNC, 0.9787),
    ])
    def test_stored_fields_consistent(self, kind, param):
        ch = make_channel(kind, param)
        assert abs(ch.capacity - capacity(kind, param)) <= 1e-9
        assert abs(ch.z0 - bhattacharyya(kind, param)) <= 1e-12

    def test_mu_lookup(self):
        assert make_channel(ChannelKind.BEC, 0.5).mu == 3.63
        assert make_channel(ChannelKind.BSC, 0.1).mu == 4.2
        assert make_channel(ChannelKind.BAWGNC, 1.0).mu == 4.0


class TestSampleLlrs:
    def test_deterministic_per_seed(self):
        ch = make_channel(ChannelKind.BAWGNC, 1.1)
        x = np.zeros(64, dtype=np.uint8)
        a = sample_llrs(ch, x, 42)
        b = sample_llrs(ch, x, 42)
        c = sample_llrs(ch, x, 43)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_bec_all_erased(self):
        ch = make_channel(ChannelKind.BEC, 1.0)
        llr = sample_llrs(ch, np.ones(32, dtype=np.uint8), 0)
        assert np.all(llr == 0.0)

    def test_bec_noiseless(self):
        ch = make_channel(ChannelKind.BEC, 0.0)
        llr = sample_llrs(ch, np.ones(16, dtype=np.uint8), 0)
        assert np.all(llr == -LLR_CAP)
        llr = sample_llrs(ch, np.zeros(16, dtype=np.uint8), 0)
        assert np.all(llr == LLR_CAP)

    def test_bsc_noiseless_saturates(self):
        ch = make_channel(ChannelKind.BSC, 0.0)
        llr = sample_llrs(ch, np.zeros(8, dtype=np.uint8), 0)
        assert np.all(llr == LLR_CAP)

    def test_bsc_magnitude(self):
        p = 0.2
        ch = make_channel(ChannelKind.BSC, p)
        llr = sample_llrs(ch, np.zeros(256, dtype=np.uint8), 5)
        assert set(np.round(np.abs(llr), 12)) == {round(math.log(0.8 / 0.2), 12)}
        assert bsc_llr_magnitude(0.0) == LLR_CAP

    def test_bawgnc_llr_scale(self):
        sigma = 0.8
        ch = make_channel(ChannelKind.BAWGNC, sigma)
        rng = np.random.default_rng(9)
        llr = sample_llrs(ch, np.zeros(20000, dtype=np.uint8), rng)
        # llr = 2y/sigma^2 with y ~ N(1, sigma^2): mean 2/sigma^2, sd 2/sigma
        assert llr.mean() == pytest.approx(2 / sigma ** 2, rel=0.05)
        assert llr.std() == pytest.approx(2 / sigma, rel=0.05)

    def test_rejects_matrix_input(self):
        ch = make_channel(ChannelKind.BEC, 0.5)
        with pytest.raises(ValueError):
            sample_llrs(ch, np.zeros((2, 8), dtype=np.uint8), 0)
