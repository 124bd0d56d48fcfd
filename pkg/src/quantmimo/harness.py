"""Monte Carlo downlink engine: trials, sweeps, and CSV emission.

Each trial derives an independent random stream from (master_seed,
trial_index), draws a channel realization and payload bits, runs the
configured precoder on the channel estimate only, transmits through the
true channel with additive complex Gaussian noise, and counts bit
errors after genie-scaled hard decisions.

The precoder output does not depend on the noise level, so a sweep
solves each trial's precoding problem once and reuses it across the SNR
list. Trials are embarrassingly parallel; aggregation sums integer
counters, making results independent of worker count and schedule.

SNR convention: snr_linear = power / sigma^2 where sigma^2 is the
per-user complex noise variance (also echoed in the metadata sidecar).
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import baselines, sdr
from .channel import (
    ERROR_MODES,
    draw_realization,
    realify,
    realify_vec,
)
from .modem import SCHEMES, constellation, demodulate, modulate
from .quantizer import build_uniform_quantizer, lift_matrix

PRECODER_IDS = ("zf_inf", "zf_quantized", "rsdr", "sdr_nominal", "exhaustive")
SUPPORTED_BITS = (1, 2, 3)

CSV_HEADER = "precoder,bits,eta,snr_db,trials,symbols,bit_errors,ber"


@dataclass(frozen=True)
class SimConfig:
    """One sweep description; `bits` and `eta` may hold several values."""

    n_tx: int
    n_users: int
    bits: tuple[int, ...]
    eta: tuple[float, ...]
    snr_db_list: tuple[float, ...]
    scheme: str
    trials: int
    master_seed: int
    precoder_id: str
    power: float = 1.0
    error_mode: str = "bounded"
    symbols_per_trial: int = 1
    n_random: int = 50
    lmi_sign: str = "corrected"
    design_eta: float | None = None
    solver_tol: float = 1e-6
    engine: str = "fast"

    def __post_init__(self):
        object.__setattr__(self, "bits", _as_tuple(self.bits, int))
        object.__setattr__(self, "eta", _as_tuple(self.eta, float))
        object.__setattr__(
            self, "snr_db_list", _as_tuple(self.snr_db_list, float)
        )
        if self.n_users < 1 or self.n_tx < self.n_users:
            raise ValueError("need n_tx >= n_users >= 1")
        for b in self.bits:
            if b not in SUPPORTED_BITS:
                raise ValueError(f"bits must be in {SUPPORTED_BITS}, got {b}")
        for e in self.eta:
            if not 0.0 <= e <= 1.0:
                raise ValueError(f"eta must lie in [0, 1], got {e}")
        if not self.snr_db_list:
            raise ValueError("snr_db_list must be nonempty")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.precoder_id not in PRECODER_IDS:
            raise ValueError(f"precoder_id must be one of {PRECODER_IDS}")
        if self.error_mode not in ERROR_MODES:
            raise ValueError(f"error_mode must be one of {ERROR_MODES}")
        if self.symbols_per_trial < 1:
            raise ValueError("symbols_per_trial must be >= 1")
        if not self.power > 0:
            raise ValueError("power must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _as_tuple(value, cast):
    if np.isscalar(value):
        return (cast(value),)
    return tuple(cast(v) for v in value)


@dataclass(frozen=True)
class BerRecord:
    """One BER curve point."""

    precoder_id: str
    bits: int
    eta: float
    snr_db: float
    trials: int
    symbols_sent: int
    bit_errors: int
    ber: float


def step_for_power(n_tx: int, bits: int, power: float) -> float:
    """DAC step such that the all-max-label vector exactly meets power.

    Combined with unit-norm decomposition weights this keeps per-bit
    comparisons power-fair: the largest reachable transmit vector has
    squared norm `power` for every bit depth.
    """
    weights_sum = float(np.sum(2.0 ** np.arange(bits)))
    weights_sum /= np.sqrt(float(np.sum(4.0 ** np.arange(bits))))
    return 2.0 * np.sqrt(power / (2.0 * n_tx)) / weights_sum


def _trial_streams(master_seed: int, trial_index: int):
    root = np.random.SeedSequence(
        entropy=master_seed, spawn_key=(trial_index,)
    )
    children = root.spawn(4)
    return tuple(np.random.default_rng(c) for c in children)


class _PrecoderFailure(Exception):
    pass


def _precode(cfg: SimConfig, bits: int, eta: float, realization, s, rng_round):
    """Run the configured precoder; returns (x, receive_scale)."""
    if cfg.precoder_id == "zf_inf":
        out = baselines.zf_precoder(realization.estimate, s, cfg.power)
        return out.x, 1.0 / out.beta
    qspec = build_uniform_quantizer(bits, step_for_power(cfg.n_tx, bits, cfg.power))
    if cfg.precoder_id == "zf_quantized":
        out = baselines.quantized_zf(realization.estimate, s, qspec, cfg.power)
        return out.x, 1.0 / out.beta

    h_tilde = realify(realization.estimate, np.sqrt(1.0 - eta))
    s_tilde = realify_vec(s)
    c_matrix = lift_matrix(cfg.n_tx, qspec)
    if cfg.precoder_id == "sdr_nominal":
        design_eta = 0.0
    elif cfg.design_eta is not None:
        design_eta = cfg.design_eta
    else:
        design_eta = eta
    instance = sdr.make_lift_instance(h_tilde, s_tilde, c_matrix, design_eta)

    if cfg.precoder_id == "exhaustive":
        v_opt, _ = baselines.exhaustive_precoder(instance, qspec.step)
        x_r = (qspec.step / 2.0) * (instance.c_matrix @ v_opt)
    else:
        model = sdr.assemble_robust_model(instance, cfg.lmi_sign)
        sol = sdr.solve_relaxation(
            model, {"engine": cfg.engine, "tol": cfg.solver_tol}
        )
        if sol.solver_status == sdr.SOLVED_INFEASIBLE or not np.all(
            np.isfinite(sol.v_star)
        ):
            raise _PrecoderFailure("relaxation failed")
        x_r, _ = sdr.round_solution(
            sol.v_star, instance, qspec.step, cfg.n_random, rng_round
        )

    norm = np.linalg.norm(x_r)
    if norm == 0:
        raise _PrecoderFailure("zero transmit vector")
    x_r = x_r * (np.sqrt(cfg.power) / norm)
    try:
        beta = sdr.recover_precoding_factor(x_r, h_tilde, s_tilde)
    except sdr.PrecodingFactorError as exc:
        raise _PrecoderFailure(str(exc)) from exc
    return sdr.complexify(x_r), 1.0 / beta


def _trial_core(cfg: SimConfig, bits: int, eta: float, trial_index: int):
    """One trial evaluated at every SNR point.

    Returns (errors per snr, symbols_sent, failures). The precoder does
    not see the noise level, so its output is shared across the SNR
    list; unit-variance noise draws are scaled per point.
    """
    rng_channel, rng_bits, rng_round, rng_noise = _trial_streams(
        cfg.master_seed, trial_index
    )
    realization = draw_realization(
        cfg.n_users, cfg.n_tx, eta, cfg.error_mode, rng_channel
    )
    cspec = constellation(cfg.scheme)
    bps = cspec.bits_per_symbol
    k = cfg.n_users
    n_snr = len(cfg.snr_db_list)
    errors = np.zeros(n_snr, dtype=np.int64)
    failures = 0

    payload = rng_bits.integers(0, 2, size=(cfg.symbols_per_trial, k * bps))
    # one unit-variance noise draw per symbol vector, scaled per SNR
    # point: marginals are exact and a single-point run reproduces the
    # same numbers as any sweep containing that point
    noise_unit = (
        rng_noise.standard_normal((cfg.symbols_per_trial, k))
        + 1j * rng_noise.standard_normal((cfg.symbols_per_trial, k))
    ) / np.sqrt(2)

    for j in range(cfg.symbols_per_trial):
        tx_bits = payload[j]
        s = modulate(tx_bits, cspec)
        try:
            x, receive_scale = _precode(
                cfg, bits, eta, realization, s, rng_round
            )
        except (_PrecoderFailure, ValueError):
            # fallback: coin-flip decisions for every SNR point
            failures += 1
            guess = rng_round.integers(0, 2, size=tx_bits.size)
            errors += int(np.sum(guess != tx_bits))
            continue
        y_clean = realization.true_channel @ x
        for i, snr_db in enumerate(cfg.snr_db_list):
            sigma = np.sqrt(cfg.power / 10.0 ** (snr_db / 10.0))
            y = y_clean + sigma * noise_unit[j]
            rx_bits = demodulate(y, receive_scale, cspec)
            errors[i] += int(np.sum(rx_bits != tx_bits))
    return errors, cfg.symbols_per_trial * k, failures


def run_trial(cfg: SimConfig, trial_index: int):
    """Spec surface for a single-point config: (bit_errors, symbols)."""
    if len(cfg.bits) != 1 or len(cfg.eta) != 1 or len(cfg.snr_db_list) != 1:
        raise ValueError("run_trial expects a single-point configuration")
    errors, symbols, _ = _trial_core(
        cfg, cfg.bits[0], cfg.eta[0], trial_index
    )
    return int(errors[0]), symbols


_BLAS_LIMITER = None


def _limit_blas_threads():
    global _BLAS_LIMITER
    try:
        from threadpoolctl import threadpool_limits

        _BLAS_LIMITER = threadpool_limits(limits=1)
    except Exception:
        os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")


def _worker(args):
    cfg, combo_index, bits, eta, start, stop = args
    errors = None
    symbols = 0
    failures = 0
    for trial in range(start, stop):
        e, sym, fail = _trial_core(cfg, bits, eta, trial)
        errors = e if errors is None else errors + e
        symbols += sym
        failures += fail
    return combo_index, errors, symbols, failures


def sweep(cfg: SimConfig, workers: int | None = None) -> list[BerRecord]:
    """Run every (bits, eta) combination over the SNR list.

    `workers` > 1 shards trials over processes; results are identical
    for any worker count. Returns records sorted by (precoder, bits,
    eta, snr).
    """
    combos = [(b, e) for b in cfg.bits for e in cfg.eta]
    if workers is None:
        workers = 1
    workers = max(1, int(workers))

    tasks = []
    chunk = max(1, cfg.trials // (workers * 8)) if workers > 1 else cfg.trials
    for ci, (b, e) in enumerate(combos):
        for start in range(0, cfg.trials, chunk):
            tasks.append((cfg, ci, b, e, start, min(start + chunk, cfg.trials)))

    totals = {
        ci: [np.zeros(len(cfg.snr_db_list), dtype=np.int64), 0, 0]
        for ci in range(len(combos))
    }
    if workers == 1:
        _limit_blas_threads()
        results = map(_worker, tasks)
        for ci, errors, symbols, failures in results:
            totals[ci][0] += errors
            totals[ci][1] += symbols
            totals[ci][2] += failures
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_limit_blas_threads
        ) as pool:
            for ci, errors, symbols, failures in pool.map(_worker, tasks):
                totals[ci][0] += errors
                totals[ci][1] += symbols
                totals[ci][2] += failures

    cspec = constellation(cfg.scheme)
    records = []
    for ci, (b, e) in enumerate(combos):
        errors, symbols, _ = totals[ci]
        for i, snr in enumerate(cfg.snr_db_list):
            total_bits = symbols * cspec.bits_per_symbol
            records.append(
                BerRecord(
                    precoder_id=cfg.precoder_id,
                    bits=b,
                    eta=e,
                    snr_db=snr,
                    trials=cfg.trials,
                    symbols_sent=symbols,
                    bit_errors=int(errors[i]),
                    ber=errors[i] / total_bits,
                )
            )
    records.sort(key=lambda r: (r.precoder_id, r.bits, r.eta, r.snr_db))
    return records


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def emit_csv(records: list[BerRecord], path) -> None:
    """Write records as CSV, deterministically ordered and formatted."""
    if not records:
        raise ValueError("no records to emit")
    ordered = sorted(
        records, key=lambda r: (r.precoder_id, r.bits, r.eta, r.snr_db)
    )
    lines = [CSV_HEADER]
    for r in ordered:
        lines.append(
            ",".join(
                _format_value(v)
                for v in (
                    r.precoder_id,
                    r.bits,
                    r.eta,
                    r.snr_db,
                    r.trials,
                    r.symbols_sent,
                    r.bit_errors,
                    r.ber,
                )
            )
        )
    try:
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc


def load_records(path) -> list[BerRecord]:
    """Parse a CSV produced by emit_csv back into records."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"unrecognized CSV header in {path}")
    records = []
    for ln in lines[1:]:
        parts = ln.split(",")
        records.append(
            BerRecord(
                precoder_id=parts[0],
                bits=int(parts[1]),
                eta=float(parts[2]),
                snr_db=float(parts[3]),
                trials=int(parts[4]),
                symbols_sent=int(parts[5]),
                bit_errors=int(parts[6]),
                ber=float(parts[7]),
            )
        )
    return records


def sweep_metadata(cfg: SimConfig, wall_time: float) -> dict:
    """Config echo and environment notes for the JSON sidecar."""
    return {
        "config": asdict(cfg),
        "snr_definition": "snr_linear = power / sigma^2, sigma^2 = per-user"
        " complex noise variance",
        "wall_time_seconds": wall_time,
        "package": "quantmimo 0.1.0",
    }
