"""
Tests for J1, G(v) = J1(v)/v and G'(v)/v against scipy and mpmath.
"""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special
from scipy.optimize import brentq

from hyperfold.models.result_models import BesselRegime
from hyperfold.services import special_functions as sf


class TestJ1:
    def test_series_regime_matches_scipy(self):
        v = np.linspace(-12.0, 12.0, 2001)
        assert np.max(np.abs(sf.j1_array(v) - special.j1(v))) <= 5e-12

    def test_asymptotic_regime_matches_scipy(self):
        v = np.concatenate([np.linspace(12.01, 100.0, 3000), np.linspace(100.0, 5000.0, 1000)])
        assert np.max(np.abs(sf.j1_array(v) - special.j1(v))) <= 1e-10

    @pytest.mark.parametrize("v", [0.3, 2.0, 7.5, 11.9, 12.5, 40.0, 333.3])
    def test_extended_precision(self, v):
        expected = float(mpmath.besselj(1, v))
        result = sf.j1(v)
        assert abs(result.value - expected) <= 10.0 * result.est_error + 1e-15
        assert result.value == pytest.approx(expected, rel=1e-9)

    def test_regime_is_reported(self):
        assert sf.j1(5.0).regime is BesselRegime.SERIES
        assert sf.j1(-12.0).regime is BesselRegime.SERIES
        assert sf.j1(12.5).regime is BesselRegime.ASYMPTOTIC

    def test_first_positive_zero(self):
        root = brentq(lambda v: sf.j1(v).value, 3.0, 4.5, xtol=1e-14)
        assert root == pytest.approx(3.8317059702, abs=1e-9)

    def test_zero_at_origin(self):
        assert sf.j1(0.0).value == 0.0

    @given(st.floats(min_value=0.0, max_value=1e4, allow_nan=False))
    @settings(max_examples=300, deadline=None)
    def test_odd_bit_for_bit(self, v):
        assert sf.j1(-v).value == -sf.j1(v).value

    def test_forced_regimes_agree_in_overlap(self):
        for v in (10.0, 11.0, 12.0, 13.0, 14.0):
            series = sf.j1_series(v).value
            hankel = sf.j1_asymptotic(v).value
            assert abs(series - hankel) <= 1e-8 * math.sqrt(2.0 / (math.pi * v))

    def test_regime_overlap_error(self):
        assert sf.regime_overlap_error() <= 1e-8

    def test_recurrence(self):
        v = np.linspace(0.5, 60.0, 1200)
        residual = sf._j0_array(v) + sf._j2_array(v) - 2.0 * sf.j1_array(v) / v
        assert np.max(np.abs(residual)) <= 1e-10


class TestG:
    def test_value_at_origin(self):
        assert sf.G(0.0) == 0.5

    def test_matches_scipy(self):
        v = np.linspace(0.01, 200.0, 4000)
        assert np.max(np.abs(sf.G_array(v) - special.j1(v) / v)) <= 1e-12

    @given(st.floats(min_value=0.0, max_value=1e3, allow_nan=False))
    @settings(max_examples=200, deadline=None)
    def test_even_bit_for_bit(self, v):
        assert sf.G(-v) == sf.G(v)

    def test_envelope(self):
        v = np.linspace(50.0, 500.0, 5000)
        assert np.all(np.abs(sf.G_array(v) - sf.g_envelope(v)) <= 0.5 * v ** -2.5)


class TestGPrimeOverV:
    def test_value_at_origin(self):
        assert sf.gprime_over_v(0.0) == pytest.approx(-0.125, abs=1e-16)

    def test_matches_scipy_derivative(self):
        v = np.linspace(0.05, 100.0, 3000)
        gprime = (special.jvp(1, v) * v - special.j1(v)) / (v * v)
        assert np.max(np.abs(sf.gprime_over_v_array(v) - gprime / v)) <= 1e-11

    def test_branches_agree_at_the_switch(self):
        series, closed = sf.gprime_over_v_branches(sf.W_SERIES_LIMIT)
        assert series == pytest.approx(closed, abs=1e-12)

    def test_bounded(self):
        v = np.linspace(0.0, 100.0, 10_001)
        assert np.max(np.abs(sf.gprime_over_v_array(v))) == pytest.approx(0.125, abs=1e-12)

    def test_bounded_on_a_long_range(self):
        v = np.linspace(0.0, 1000.0, 200_001)
        values = sf.gprime_over_v_array(v)
        assert np.max(np.abs(values)) == pytest.approx(0.125, abs=1e-12)
        assert np.argmax(np.abs(values)) == 0
        tail = v >= 100.0
        gprime = (special.jvp(1, v[tail]) * v[tail] - special.j1(v[tail])) / (v[tail] * v[tail])
        assert np.max(np.abs(values[tail] - gprime / v[tail])) <= 1e-11

    def test_decay_crossover(self):
        crossover = sf.gprime_decay_crossover()
        assert 0.0 <= crossover < 1000.0
        assert sf.gprime_decay_crossover(c_bound=10.0) <= crossover
