"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from quantmimo import channel, quantizer, sdr


def random_instance(
    n_users: int,
    n_tx: int,
    bits: int,
    eta: float,
    seed: int,
    step: float = 1.0,
) -> tuple[sdr.LiftInstance, quantizer.QuantizerSpec]:
    """Random lifted instance with QPSK-like unit-modulus targets."""
    rng = np.random.default_rng(seed)
    h_est = channel.sample_channel_estimate(n_users, n_tx, rng)
    re = rng.integers(0, 2, n_users) * 2 - 1
    im = rng.integers(0, 2, n_users) * 2 - 1
    s = (re + 1j * im) / np.sqrt(2)
    spec = quantizer.build_uniform_quantizer(bits, step)
    c_matrix = quantizer.lift_matrix(n_tx, spec)
    h_tilde = channel.realify(h_est, np.sqrt(1.0 - eta))
    s_tilde = channel.realify_vec(s)
    instance = sdr.make_lift_instance(h_tilde, s_tilde, c_matrix, eta)
    return instance, spec
