"""Metrics: SINR/SE evaluation, QPSK chain, BER Monte Carlo, convergence traces."""

import numpy as np
import pytest

from helpers import sinr_scalar_oracle, small_config, small_draw
from xlmimo.channel import assemble_blocks
from xlmimo.config import ExperimentConfig, apply_overrides
from xlmimo.errors import ConfigurationError
from xlmimo.metrics import (ber_montecarlo, convergence_trace, coupling_matrix,
                            qpsk_detect, qpsk_modulate, se_trial, sinr_eq9,
                            sum_se)
from xlmimo.precoder import BlockPrecoder, build_precoder
from xlmimo.scenario import build_scenario


def _zero_precoder(real):
    return BlockPrecoder(G1=np.zeros_like(real.H1), Gc=np.zeros_like(real.Hc),
                         G2=np.zeros_like(real.H2), beta_1=0.0, beta_c=0.0,
                         beta_2=0.0, G=np.zeros_like(real.H))


class TestSinr:
    def test_zero_precoder_zero_rate(self):
        _, draw = small_draw()
        report = sinr_eq9(draw.realization, _zero_precoder(draw.realization),
                          1e-8)
        np.testing.assert_array_equal(report.gamma, 0.0)
        assert report.sum_se == 0.0

    def test_sum_is_sum_of_users(self):
        _, draw = small_draw()
        pre = build_precoder(draw.realization, 0.5, 1.0, "direct")
        report = sinr_eq9(draw.realization, pre, 1e-9)
        assert report.sum_se == pytest.approx(report.se_per_user.sum())
        assert np.all(report.gamma >= 0)
        assert np.all(np.isfinite(report.gamma))

    def test_coupling_matrix_equals_full_product(self):
        _, draw = small_draw()
        pre = build_precoder(draw.realization, 0.5, 1.0, "direct")
        B = coupling_matrix(draw.realization, pre)
        full = draw.realization.H.conj().T @ pre.G
        np.testing.assert_allclose(B, full, atol=1e-12)

    def test_vectorized_matches_scalar_oracle(self):
        _, draw = small_draw()
        pre = build_precoder(draw.realization, 0.5, 1.0, "direct")
        report = sinr_eq9(draw.realization, pre, 1e-9)
        oracle = sinr_scalar_oracle(draw.realization, pre, 1e-9)
        np.testing.assert_allclose(report.gamma, oracle, rtol=1e-12)

    def test_single_user_groups_no_interference(self):
        rng = np.random.default_rng(0)
        H1 = rng.standard_normal((3, 1)) + 1j * rng.standard_normal((3, 1))
        H2 = rng.standard_normal((3, 1)) + 1j * rng.standard_normal((3, 1))
        # users invisible to the central subarray: cross terms vanish
        real = assemble_blocks(H1, np.zeros((3, 2), complex), H2)
        G1 = H1 / np.linalg.norm(H1)
        G2 = H2 / np.linalg.norm(H2)
        pre = BlockPrecoder(G1=G1, Gc=np.zeros((3, 2), complex), G2=G2,
                            beta_1=1.0, beta_c=1.0, beta_2=1.0,
                            G=assemble_blocks(G1, np.zeros((3, 2), complex),
                                              G2).H)
        report = sinr_eq9(real, pre, 0.5)
        expected = np.array([np.linalg.norm(H1) ** 2,
                             np.linalg.norm(H2) ** 2]) / 0.5
        np.testing.assert_allclose(report.gamma, expected, rtol=1e-12)

    def test_invalid_noise_rejected(self):
        _, draw = small_draw()
        with pytest.raises(ConfigurationError):
            sinr_eq9(draw.realization, _zero_precoder(draw.realization), 0.0)


class TestSumSe:
    def test_mean_and_sem(self):
        mean, sem = sum_se([1.0, 2.0, 3.0])
        assert mean == pytest.approx(2.0)
        assert sem == pytest.approx(1.0 / np.sqrt(3.0))

    def test_single_trial(self):
        assert sum_se([5.0]) == (5.0, 0.0)

    def test_empty_rejected(self):
        with pytest.raises(ConfigurationError):
            sum_se([])


class TestQpsk:
    def test_round_trip_all_symbols(self):
        bits = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.int8)
        sym = qpsk_modulate(bits)
        np.testing.assert_allclose(np.abs(sym), 1.0)
        np.testing.assert_array_equal(qpsk_detect(sym), bits)

    def test_unit_average_power(self):
        rng = np.random.default_rng(1)
        bits = rng.integers(0, 2, size=(1000, 2), dtype=np.int8)
        sym = qpsk_modulate(bits)
        assert np.mean(np.abs(sym) ** 2) == pytest.approx(1.0)


class TestBer:
    def test_smoke_and_report_fields(self):
        cfg = small_config()
        report = ber_montecarlo(cfg, ["direct", "cg"], snr_grid_db=[10.0])
        assert set(report.ber) == {"direct", "cg"}
        assert report.bits_simulated >= cfg.run.bits_per_point
        for m in report.ber:
            assert np.all(report.ber[m] >= 0) and np.all(report.ber[m] <= 0.5)
            assert report.bit_errors[m].dtype == np.int64

    def test_noiseless_limit_direct(self):
        # one user per group so every block can be zero-forced; at 60 dB the
        # residual noise and interference leave essentially no bit errors
        cfg = small_config(**{"users.K": 2})
        report = ber_montecarlo(cfg, "direct", snr_grid_db=[60.0])
        assert report.ber["direct"][0] < 1e-4

    def test_empty_grid_rejected(self):
        with pytest.raises(ConfigurationError):
            ber_montecarlo(small_config(), "direct", snr_grid_db=[])

    def test_channel_scale_invariance(self):
        """Scaling H by c with sigma^2 by c^2 at fixed P leaves decisions unchanged."""
        cfg = small_config()
        scenario, draw = small_draw(cfg)
        real = draw.realization
        power, sigma2, xi = 1.0, 1e-5, 1e-5
        c = 2.0
        rng = np.random.default_rng(2)
        bits = rng.integers(0, 2, size=(scenario.K, 64, 2), dtype=np.int8)
        sym = qpsk_modulate(bits)
        noise = (rng.standard_normal((scenario.K, 64))
                 + 1j * rng.standard_normal((scenario.K, 64)))

        def decisions(realization, s2, x):
            pre = build_precoder(realization, x, power, "direct")
            B = coupling_matrix(realization, pre)
            gain = np.diag(B).copy()
            Y = B @ sym + np.sqrt(s2 / 2.0) * noise
            return qpsk_detect(Y / gain[:, None])

        base = decisions(real, sigma2, xi)
        scaled = decisions(real.scaled(c), sigma2 * c ** 2, xi * c ** 2)
        np.testing.assert_array_equal(base, scaled)


class TestConvergenceTrace:
    def test_shared_start_and_shapes(self):
        cfg = small_config()
        traces = convergence_trace(cfg, T_max=4, trials=5)
        assert set(traces) == {"gs", "jor", "cg", "jacpcg"}
        for trace in traces.values():
            assert trace.shape == (5,)
            # w0 = 0 means the initial normalized error is exactly 1
            assert trace[0] == pytest.approx(1.0)

    def test_tmax_validation(self):
        with pytest.raises(ConfigurationError):
            convergence_trace(small_config(), T_max=0)

    def test_needs_iterative_method(self):
        with pytest.raises(ConfigurationError):
            convergence_trace(small_config(), methods=["direct"])


class TestSeTrial:
    def test_paired_draw_and_direct_dominance_tendency(self):
        cfg = ExperimentConfig()
        apply_overrides(cfg, ["power.snr_db=25.0"])
        scenario = build_scenario(cfg)
        out = se_trial(cfg, scenario, 0, ["direct", "cg", "jor"])
        assert set(out) == {"direct", "cg", "jor"}
        assert all(v > 0 for v in out.values())

    def test_deterministic(self):
        cfg = small_config()
        scenario = build_scenario(cfg)
        a = se_trial(cfg, scenario, 3, ["direct", "cg"])
        b = se_trial(cfg, scenario, 3, ["direct", "cg"])
        assert a == b
