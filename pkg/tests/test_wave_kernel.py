"""
Tests for the cutoff pair, the explicit wave kernel and the smoothed
kernel K_alpha.
"""

import math

import numpy as np
import pytest

from hyperfold.exceptions import DomainError, PreconditionError
from hyperfold.services import phase_function as pf
from hyperfold.services import wave_kernel as wk


def _gaussian(center: float, width: float = 0.1):
    def fn(t):
        return math.exp(-0.5 * ((t - center) / width) ** 2)

    def fn_prime(t):
        return -(t - center) / width ** 2 * fn(t)

    return fn, fn_prime, (center - 10 * width, center + 10 * width)


class TestCutoffs:
    def test_rho_is_normalised_at_the_origin(self, cutoffs):
        assert cutoffs.rho(0.0)[0] == pytest.approx(1.0, abs=1e-12)
        assert cutoffs.chi(0.0)[0] == pytest.approx(1.0, abs=1e-12)

    def test_chi_hat_integrates_to_chi_at_the_origin(self, cutoffs):
        h = cutoffs.chi_grid[1] - cutoffs.chi_grid[0]
        assert h / (2.0 * math.pi) * cutoffs.chi_hat_grid.sum() == pytest.approx(1.0, abs=1e-10)

    def test_chi_hat_transforms_to_rho_squared(self, cutoffs):
        x = np.linspace(0.0, 20.0, 41)
        h = cutoffs.chi_grid[1] - cutoffs.chi_grid[0]
        chi = (h / (2.0 * math.pi)) * np.cos(np.outer(x, cutoffs.chi_grid)) @ cutoffs.chi_hat_grid
        assert np.max(np.abs(chi - cutoffs.rho(x) ** 2)) <= 1e-10

    def test_supports(self, cutoffs):
        assert np.all(cutoffs.rho_hat(np.array([-0.7, -0.5, 0.5, 0.9])) == 0.0)
        assert np.all(cutoffs.chi_hat(np.array([-1.5, -1.0, 1.0, 3.0])) == 0.0)
        assert cutoffs.chi_hat(0.0)[0] > 0.0

    def test_chi_hat_even(self, cutoffs):
        tau = np.linspace(0.0, 0.99, 50)
        assert np.allclose(cutoffs.chi_hat(tau), cutoffs.chi_hat(-tau), rtol=0.0, atol=1e-10)

    def test_chi_hat_prime_matches_differences(self, cutoffs):
        tau = np.array([-0.6, -0.2, 0.1, 0.45])
        h = 1e-5
        fd = (cutoffs.chi_hat(tau + h) - cutoffs.chi_hat(tau - h)) / (2 * h)
        assert np.allclose(cutoffs.chi_hat_prime(tau), fd, rtol=1e-5, atol=1e-8)

    def test_beta_bump(self, cutoffs):
        assert np.all(cutoffs.beta_bump(np.array([0.0, 1.0, -1.5, 1.5])) == 1.0)
        assert np.all(cutoffs.beta_bump(np.array([2.0, -2.5, 10.0])) == 0.0)
        middle = cutoffs.beta_bump(np.array([1.75]))[0]
        assert 0.0 < middle < 1.0

    def test_unknown_shape(self):
        with pytest.raises(DomainError, match="unknown cutoff shape"):
            wk.make_cutoffs("top-hat")


class TestWaveTail:
    @pytest.mark.parametrize("r", [1.0, 2.5, 7.0])
    def test_value_on_the_light_cone(self, r):
        assert wk.wave_tail(r, r) == pytest.approx(-r * r / 8.0, rel=1e-14)
        assert wk.wave_tail(-r, r) == pytest.approx(-r * r / 8.0, rel=1e-14)

    def test_zero_inside_the_light_cone(self):
        assert wk.wave_tail(1.9, 2.0) == 0.0
        assert wk.wave_tail(0.0, 2.0) == 0.0

    def test_even_in_t(self):
        t = np.linspace(3.0, 30.0, 100)
        assert np.array_equal(wk.wave_tail_array(t, 3.0), wk.wave_tail_array(-t, 3.0))

    def test_radius_must_be_positive(self):
        with pytest.raises(DomainError):
            wk.wave_tail(1.0, 0.0)


class TestWavePairing:
    @pytest.mark.parametrize("r", [2.0, 4.0, 8.0])
    @pytest.mark.parametrize("offset", [1.0, 2.0, 3.0])
    def test_agrees_with_relation_oracle(self, r, offset):
        fn, fn_prime, support = _gaussian(r + offset)
        direct = wk.wave_pairing(fn, r, support, fn_prime)
        oracle = wk.relation_oracle(fn, r, support, fn_prime)
        assert direct == pytest.approx(oracle, rel=1e-6)

    def test_bump_straddling_the_light_cone(self):
        r = 3.0
        fn, fn_prime, support = _gaussian(r + 0.05, width=0.2)
        direct = wk.wave_pairing(fn, r, support, fn_prime)
        oracle = wk.relation_oracle(fn, r, support, fn_prime)
        assert direct == pytest.approx(oracle, rel=1e-6)

    def test_finite_propagation(self):
        r = 6.0
        fn, fn_prime, support = _gaussian(r - 3.5)
        assert wk.wave_pairing(fn, r, support, fn_prime) == 0.0
        assert wk.relation_oracle(fn, r, support, fn_prime) == 0.0

    def test_even_test_function_pairs_symmetrically(self):
        r = 2.0

        def fn(t):
            return math.exp(-0.5 * ((abs(t) - 4.0) / 0.2) ** 2)

        whole = wk.wave_pairing(fn, r, (-6.0, 6.0))
        half = wk.wave_pairing(fn, r, (2.0, 6.0))
        assert whole == pytest.approx(2.0 * half, rel=1e-8)

    def test_numeric_derivative_fallback(self):
        fn, fn_prime, support = _gaussian(4.0, width=0.3)
        exact = wk.wave_pairing(fn, 4.0, support, fn_prime)
        fallback = wk.wave_pairing(fn, 4.0, support)
        assert fallback == pytest.approx(exact, rel=1e-7)

    def test_oracle_needs_positive_support(self):
        fn, fn_prime, _ = _gaussian(1.0)
        with pytest.raises(DomainError):
            wk.relation_oracle(fn, 2.0, (-1.0, 3.0), fn_prime)


class TestKAlpha:
    def test_preconditions_list_every_violation(self, cutoffs):
        with pytest.raises(PreconditionError) as info:
            wk.k_alpha_radial(0.5, -1.0, 1.0, cutoffs)
        assert len(info.value.violations) == 3

    def test_outside_the_support(self, cutoffs):
        ev = wk.k_alpha_radial(9.0, 32.0, 8.0, cutoffs)
        assert ev.total == 0j
        assert ev.tail_nodes == 0

    def test_three_terms_sum_to_total(self, cutoffs):
        ev = wk.k_alpha_radial(3.0, 32.0, 8.0, cutoffs)
        assert ev.total == ev.delta_prime_term + ev.delta_term + ev.tail_term
        assert ev.tail_nodes > 0
        assert math.isfinite(ev.bound_ratio)
        assert ev.bound_ratio == pytest.approx(abs(ev.total) * 8.0 * math.exp(1.5) / 32.0)

    def test_term_ratios_are_finite(self, cutoffs):
        ratios = wk.term_ratios(wk.k_alpha_radial(2.0, 64.0, 8.0, cutoffs))
        assert set(ratios) == {"delta_prime", "delta", "tail"}
        assert all(math.isfinite(v) and v >= 0.0 for v in ratios.values())

    def test_delta_prime_term_grows_with_lambda(self, cutoffs):
        small = wk.k_alpha_radial(3.0, 16.0, 8.0, cutoffs)
        large = wk.k_alpha_radial(3.0, 256.0, 8.0, cutoffs)
        assert abs(large.delta_prime_term) > abs(small.delta_prime_term)

    def test_parametrised_form(self, cutoffs, nondegenerate):
        t, s = 0.5, 3.0
        via_params = wk.k_alpha(t, s, nondegenerate, 32.0, 8.0, cutoffs)
        direct = wk.k_alpha_radial(pf.phi(t, s, nondegenerate), 32.0, 8.0, cutoffs)
        assert via_params.total == direct.total

    def test_tube_sum(self, cutoffs):
        audit = wk.tube_sum_audit(32.0, 8.0, cutoffs, samples=3)
        assert [shell.k for shell in audit.shells] == [0, 1, 2]
        assert audit.total == pytest.approx(sum(2.0 ** sh.k * sh.max_abs for sh in audit.shells))
        assert 0.0 < audit.implied_C < math.inf


class TestKernelRatioSweep:
    def test_thread_count_does_not_change_rows(self, cutoffs):
        args = ([1.0, 2.0, 3.0], [16.0, 32.0], [4.0, 8.0], cutoffs)
        serial = wk.kernel_ratio_sweep(*args, threads=1)
        threaded = wk.kernel_ratio_sweep(*args, threads=3)
        assert serial.rows == threaded.rows
        assert serial.sups == threaded.sups

    def test_rows_respect_the_support(self, cutoffs):
        sweep = wk.kernel_ratio_sweep([1.0, 3.0, 6.0], [16.0], [4.0, 8.0], cutoffs)
        assert len(sweep.rows) == 5
        assert all(row["r"] <= row["T"] for row in sweep.rows)
        assert set(sweep.sups) == {"lambda=16,T=4", "lambda=16,T=8"}

    def test_sups_skip_the_window_edge(self, cutoffs):
        # K vanishes at r = T, so the sups only see r <= T - 1
        sweep = wk.kernel_ratio_sweep([1.0, 2.0, 4.0], [16.0, 32.0], [4.0], cutoffs)
        assert len(sweep.rows) == 6
        edge = [row["bound_ratio"] for row in sweep.rows if row["r"] == 4.0]
        assert edge == [0.0, 0.0]
        for lam in (16.0, 32.0):
            inner = [row["bound_ratio"] for row in sweep.rows if row["lambda"] == lam and row["r"] < 4.0]
            assert sweep.sups[f"lambda={lam:g},T=4"] == max(inner)
        assert sweep.T_sups == {"T=4": max(sweep.sups.values())}
        assert sweep.stability == 1.0

    @pytest.mark.slow
    def test_bound_ratio_is_stable(self, cutoffs):
        sweep = wk.kernel_ratio_sweep(
            range(1, 17), [2.0 ** k for k in range(7, 12)], [8.0, 16.0], cutoffs, threads=4
        )
        assert sweep.stable
        assert set(sweep.T_sups) == {"T=8", "T=16"}
        assert sweep.stability <= 8.0
        assert sweep.median_excess <= 10.0
        assert sweep.implied_C == max(sweep.T_sups.values())
        assert math.isfinite(sweep.implied_C)
