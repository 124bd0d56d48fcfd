"""Tests for the reference precoders."""

import numpy as np
import pytest

from conftest import random_instance
from quantmimo import baselines, channel, quantizer, sdr


class TestZfPrecoder:
    def test_identity_channel(self):
        s = np.array([1 + 1j, -1 + 0j]) / np.sqrt(2)
        out = baselines.zf_precoder(np.eye(2, dtype=complex), s, float((s @ s.conj()).real))
        np.testing.assert_allclose(out.x, s, rtol=1e-12)
        assert out.beta == pytest.approx(1.0)
        assert out.label == "zf_inf"

    @pytest.mark.parametrize("seed", range(6))
    def test_interference_free(self, seed):
        rng = np.random.default_rng(seed)
        h = channel.sample_channel_estimate(3, 6, rng)
        s = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        out = baselines.zf_precoder(h, s, 1.0)
        # receivers apply the reported scale: beta * (H x) must equal s
        np.testing.assert_allclose(out.beta * (h @ out.x), s, atol=1e-9)

    @pytest.mark.parametrize("seed", range(4))
    def test_power_budget(self, seed):
        rng = np.random.default_rng(seed)
        h = channel.sample_channel_estimate(2, 5, rng)
        s = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        out = baselines.zf_precoder(h, s, 2.5)
        assert np.sum(np.abs(out.x) ** 2) == pytest.approx(2.5, rel=1e-9)

    def test_rank_error(self):
        with pytest.raises(ValueError):
            baselines.zf_precoder(np.ones((4, 2), dtype=complex), np.ones(4), 1.0)


class TestQuantizedZf:
    def test_one_bit_alphabet(self):
        rng = np.random.default_rng(2)
        h = channel.sample_channel_estimate(2, 4, rng)
        s = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        spec = quantizer.build_uniform_quantizer(1, 1.0)
        out = baselines.quantized_zf(h, s, spec, 1.0)
        mags = np.concatenate([np.abs(out.x.real), np.abs(out.x.imag)])
        np.testing.assert_allclose(mags, mags[0], rtol=1e-9)
        assert np.sum(np.abs(out.x) ** 2) == pytest.approx(1.0, rel=1e-9)

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        h = channel.sample_channel_estimate(2, 4, rng)
        s = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        spec = quantizer.build_uniform_quantizer(2, 0.7)
        a = baselines.quantized_zf(h, s, spec, 1.0)
        b = baselines.quantized_zf(h, s, spec, 1.0)
        np.testing.assert_array_equal(a.x, b.x)
        assert a.beta == b.beta

    @pytest.mark.parametrize("seed", range(5))
    def test_eight_bit_transparency(self, seed):
        rng = np.random.default_rng(seed)
        h = channel.sample_channel_estimate(2, 6, rng)
        s = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        spec = quantizer.build_uniform_quantizer(8, 1.0)
        fine = baselines.quantized_zf(h, s, spec, 1.0)
        ideal = baselines.zf_precoder(h, s, 1.0)
        cosine = np.abs(np.vdot(fine.x, ideal.x)) / (
            np.linalg.norm(fine.x) * np.linalg.norm(ideal.x)
        )
        # mid-range loading clips ~1% of components at 8 bits; alignment
        # is near-perfect but not exact
        assert cosine >= 0.99


class TestExhaustivePrecoder:
    def test_planted_target(self):
        instance, spec = random_instance(2, 2, 1, 0.0, 7)
        rng = np.random.default_rng(7)
        planted = np.sign(rng.standard_normal(instance.dim))
        s_tilde = instance.h_tilde @ instance.c_matrix @ (
            (spec.step / 2.0) * planted
        )
        inst2 = sdr.make_lift_instance(
            instance.h_tilde, s_tilde, instance.c_matrix, 0.0
        )
        v_opt, objective = baselines.exhaustive_precoder(inst2, spec.step)
        assert objective <= 1e-18
        value = sdr.sign_vector_objective(planted, inst2, spec.step)
        assert value <= 1e-18

    def test_two_dim_alignment(self):
        # one antenna, one user, identity pieces: target on the diagonal
        h_tilde = np.eye(2)
        c_matrix = np.eye(2)
        s_tilde = np.array([1.0, 1.0])
        instance = sdr.make_lift_instance(h_tilde, s_tilde, c_matrix, 0.0)
        v_opt, objective = baselines.exhaustive_precoder(instance, 2.0)
        np.testing.assert_array_equal(v_opt, [1.0, 1.0])
        assert objective == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("seed", range(8))
    def test_dominates_rounded_relaxation(self, seed):
        instance, spec = random_instance(2, 2, 1, 0.0, 60 + seed)
        model = sdr.assemble_robust_model(instance)
        sol = sdr.solve_relaxation(model, {"tol": 1e-8})
        _, v_hat = sdr.round_solution(
            sol.v_star, instance, spec.step, 20, np.random.default_rng(seed)
        )
        rounded = sdr.sign_vector_objective(v_hat, instance, spec.step)
        _, best = baselines.exhaustive_precoder(instance, spec.step)
        assert best <= rounded + 1e-12

    def test_size_guard(self):
        instance, spec = random_instance(2, 6, 2, 0.0, 1)
        with pytest.raises(ValueError):
            baselines.exhaustive_precoder(instance, spec.step)

    def test_lexicographic_tie_break(self):
        # zero target: every sign vector scores ||s||^2 = 0; the all-minus
        # vector (first in enumeration order) must win
        h_tilde = np.eye(2)
        instance = sdr.make_lift_instance(
            h_tilde, np.zeros(2), np.eye(2), 0.0
        )
        v_opt, _ = baselines.exhaustive_precoder(instance, 1.0)
        np.testing.assert_array_equal(v_opt, [-1.0, -1.0])
