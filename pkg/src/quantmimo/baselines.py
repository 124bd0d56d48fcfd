"""Reference precoders: ideal zero-forcing, quantized zero-forcing, and
the exhaustive search over the discrete transmit alphabet."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sdr
from .channel import realify, realify_vec
from .quantizer import QuantizerSpec, quantize

EXHAUSTIVE_GUARD = 20

PRECODER_LABELS = ("zf_inf", "zf_quantized", "rsdr", "exhaustive")


@dataclass(frozen=True)
class PrecoderOutput:
    """Transmit vector, its least-squares scale, and the producing method.

    `beta` is the positive scalar minimizing ||s - beta * H x||; the
    receivers divide by the induced channel gain 1/beta.
    """

    x: np.ndarray
    beta: float
    label: str


def zf_precoder(
    h_est: np.ndarray, s: np.ndarray, power: float
) -> PrecoderOutput:
    """Infinite-resolution zero-forcing scaled to the power budget.

    x is proportional to H^H (H H^H)^-1 s, so the channel output is an
    exact multiple of the targets; beta = 1/gamma where gamma is the
    power-normalizing gain.
    """
    h_est = np.asarray(h_est)
    k, n = h_est.shape
    if k > n:
        raise ValueError(f"zero forcing needs K <= N, got K={k}, N={n}")
    gram = h_est @ h_est.conj().T
    try:
        z = h_est.conj().T @ np.linalg.solve(gram, s)
    except np.linalg.LinAlgError as exc:
        raise ValueError("channel estimate is rank deficient") from exc
    norm = np.linalg.norm(z)
    if norm == 0:
        raise ValueError("zero-forcing produced a zero vector")
    gamma = np.sqrt(power) / norm
    x = gamma * z
    return PrecoderOutput(x=x, beta=1.0 / gamma, label="zf_inf")


def quantized_zf(
    h_est: np.ndarray, s: np.ndarray, spec: QuantizerSpec, power: float
) -> PrecoderOutput:
    """Zero-forcing output pushed through the DAC, then power-normalized.

    The unquantized vector is loaded so its per-component RMS sits at
    half the quantizer's full range (mid-range loading), quantized
    elementwise, and rescaled to the power budget. The reported beta is
    the least-squares scale of the targets on the realized output.
    """
    unquantized = zf_precoder(h_est, s, power)
    z = unquantized.x
    z_r = realify_vec(z)
    rms = np.linalg.norm(z_r) / np.sqrt(z_r.size)
    if rms == 0:
        raise ValueError("zero-forcing produced a zero vector")
    loading = (spec.step * 2 ** (spec.bits - 1) / 2) / rms
    x = quantize(loading * z, spec)
    norm = np.linalg.norm(x)
    if norm == 0:
        # all components in the dead zone cannot happen for a mid-rise
        # quantizer (no zero label), but guard the division anyway
        raise ValueError("quantized output vanished")
    x = x * (np.sqrt(power) / norm)
    beta = sdr.recover_precoding_factor(
        realify_vec(x), realify(h_est), realify_vec(s)
    )
    return PrecoderOutput(x=x, beta=beta, label="zf_quantized")


def exhaustive_precoder(instance: sdr.LiftInstance, step: float):
    """Globally optimal sign vector by enumeration.

    Minimizes the scale-optimized residual over all sign vectors of the
    one-bit branches; ties break toward the lexicographically smallest
    vector (-1 before +1). Returns (v_opt, objective).
    """
    d = instance.dim
    if d > EXHAUSTIVE_GUARD:
        raise ValueError(
            f"exhaustive search guard: d = {d} exceeds {EXHAUSTIVE_GUARD}"
        )
    base = instance.h_tilde @ instance.c_matrix * (step / 2.0)
    s_tilde = instance.s_tilde
    s_norm = float(s_tilde @ s_tilde)

    best_val = np.inf
    best_v = None
    total = 1 << d
    chunk = 1 << min(d, 14)
    # lexicographic order: bit pattern 0 -> all -1, increasing patterns
    # flip later coordinates first, so earlier candidates are smaller
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.uint32)
        bits = (codes[:, None] >> np.arange(d - 1, -1, -1, dtype=np.uint32)) & 1
        signs = bits.astype(float) * 2.0 - 1.0
        r = signs @ base.T
        rr = np.einsum("ij,ij->i", r, r)
        sr = r @ s_tilde
        sr = np.where(sr > 0.0, sr, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = s_norm - np.where(rr > 0.0, sr * sr / rr, 0.0)
        idx = int(np.argmin(vals))
        if vals[idx] < best_val - 1e-15:
            best_val = float(vals[idx])
            best_v = signs[idx]
    return best_v, best_val
