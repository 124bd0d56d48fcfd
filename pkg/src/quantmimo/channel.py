"""Channel generation under bounded Gauss-Markov uncertainty.

The true downlink channel mixes an estimate with an error matrix,
H = sqrt(1-eta) * H_est + sqrt(eta) * E, where eta in [0, 1] grades the
estimate quality. Two error samplers are provided: `bounded` confines
the error to the ball trace(E E^H) <= eta (the regime the robust design
certifies), `gaussian` leaves the entries unconstrained.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ERROR_MODES = ("bounded", "gaussian")


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of (estimate, error, composed true channel)."""

    n_tx: int
    n_users: int
    estimate: np.ndarray
    error: np.ndarray
    eta: float
    true_channel: np.ndarray
    error_mode: str = "bounded"


@dataclass(frozen=True)
class RealExpansion:
    """Real-valued images consumed by the optimizer.

    h_tilde and e_tilde carry the sqrt(1-eta) / sqrt(eta) factors;
    s_tilde stacks the real over the imaginary part of the targets.
    """

    h_tilde: np.ndarray
    e_tilde: np.ndarray
    s_tilde: np.ndarray


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    return eta


def sample_channel_estimate(
    n_users: int, n_tx: int, rng: np.random.Generator
) -> np.ndarray:
    """i.i.d. unit-variance complex Gaussian estimate, shape (K, N).

    Requires n_tx >= n_users so linear baselines keep full row rank.
    """
    if n_users < 1:
        raise ValueError(f"n_users must be >= 1, got {n_users}")
    if n_tx < n_users:
        raise ValueError(f"n_tx ({n_tx}) must be >= n_users ({n_users})")
    re = rng.standard_normal((n_users, n_tx))
    im = rng.standard_normal((n_users, n_tx))
    return (re + 1j * im) / np.sqrt(2)


def sample_error(
    n_users: int,
    n_tx: int,
    eta: float,
    mode: str,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw an error matrix, shape (K, N).

    bounded : rescale an i.i.d. complex Gaussian draw onto the sphere
              trace(E E^H) = eta whenever the raw draw falls outside the
              ball, otherwise keep it.
    gaussian: raw i.i.d. CN(0, 1) entries, unbounded.
    """
    eta = _check_eta(eta)
    if mode not in ERROR_MODES:
        raise ValueError(f"mode must be one of {ERROR_MODES}, got {mode!r}")
    re = rng.standard_normal((n_users, n_tx))
    im = rng.standard_normal((n_users, n_tx))
    err = (re + 1j * im) / np.sqrt(2)
    if mode == "gaussian":
        return err
    power = np.sum(np.abs(err) ** 2)
    if power > eta:
        err *= np.sqrt(eta / power) if power > 0 else 0.0
    return err


def compose_channel(
    estimate: np.ndarray, error: np.ndarray, eta: float
) -> np.ndarray:
    """Mix estimate and error: sqrt(1-eta) * estimate + sqrt(eta) * error."""
    eta = _check_eta(eta)
    estimate = np.asarray(estimate)
    error = np.asarray(error)
    if estimate.shape != error.shape:
        raise ValueError(
            f"shape mismatch: estimate {estimate.shape} vs error {error.shape}"
        )
    return np.sqrt(1.0 - eta) * estimate + np.sqrt(eta) * error


def draw_realization(
    n_users: int,
    n_tx: int,
    eta: float,
    mode: str,
    rng: np.random.Generator,
) -> ChannelRealization:
    """Draw estimate and error, compose the true channel."""
    est = sample_channel_estimate(n_users, n_tx, rng)
    err = sample_error(n_users, n_tx, eta, mode, rng)
    return ChannelRealization(
        n_tx=n_tx,
        n_users=n_users,
        estimate=est,
        error=err,
        eta=_check_eta(eta),
        true_channel=compose_channel(est, err, eta),
        error_mode=mode,
    )


def realify(a: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Real image of a complex matrix or vector, optionally scaled.

    A matrix A maps to scale * [[Re A, -Im A], [Im A, Re A]]; a vector s
    maps to scale * [Re s; Im s]. Multiplication commutes with the
    mapping: realify(A) @ realify(w) == realify(A @ w) for vectors w.
    """
    if scale < 0:
        raise ValueError(f"scale must be nonnegative, got {scale}")
    a = np.asarray(a)
    if a.ndim == 1:
        return scale * np.concatenate([a.real, a.imag])
    if a.ndim != 2:
        raise ValueError(f"expected a vector or matrix, got ndim={a.ndim}")
    top = np.hstack([a.real, -a.imag])
    bot = np.hstack([a.imag, a.real])
    return scale * np.vstack([top, bot])


def realify_vec(s: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Real image [Re s; Im s] of a complex vector."""
    s = np.asarray(s)
    if s.ndim != 1:
        raise ValueError(f"expected a vector, got ndim={s.ndim}")
    return realify(s, scale)


def expand(realization: ChannelRealization, s: np.ndarray) -> RealExpansion:
    """Real expansion of one realization and its target symbol vector."""
    s = np.asarray(s)
    if s.shape != (realization.n_users,):
        raise ValueError(
            f"target length {s.shape} does not match K={realization.n_users}"
        )
    eta = realization.eta
    return RealExpansion(
        h_tilde=realify(realization.estimate, np.sqrt(1.0 - eta)),
        e_tilde=realify(realization.error, np.sqrt(eta)),
        s_tilde=realify_vec(s),
    )


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent, reproducible stream for one Monte Carlo trial."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,))
    return np.random.default_rng(seq)
