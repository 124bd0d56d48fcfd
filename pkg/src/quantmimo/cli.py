"""Command line front end.

Subcommands:

* ``sweep``  -- Monte Carlo BER sweep from a JSON config, CSV out.
* ``solve``  -- robust relaxation of a single instance file, prints the
  optimal slack, the multiplier, and the rounded objective.
* ``oracle`` -- exhaustive search on the same instance file.

An instance file is JSON with n_tx, n_users, bits, eta, the channel
estimate split as h_est_real / h_est_imag (row-major), the targets as
s_real / s_imag, and optional power (default 1) and step (default from
the full-scale power loading rule).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import baselines, harness, sdr
from .channel import realify, realify_vec
from .quantizer import build_uniform_quantizer, lift_matrix


def _load_instance(path, lmi_sign_eta_override=None):
    with open(path) as fh:
        data = json.load(fh)
    for key in ("n_tx", "n_users", "bits", "eta", "h_est_real", "h_est_imag",
                "s_real", "s_imag"):
        if key not in data:
            raise ValueError(f"instance file missing key {key!r}")
    n_tx = int(data["n_tx"])
    n_users = int(data["n_users"])
    bits = int(data["bits"])
    eta = float(data["eta"])
    power = float(data.get("power", 1.0))
    h_est = np.asarray(data["h_est_real"], dtype=float) + 1j * np.asarray(
        data["h_est_imag"], dtype=float
    )
    s = np.asarray(data["s_real"], dtype=float) + 1j * np.asarray(
        data["s_imag"], dtype=float
    )
    if h_est.shape != (n_users, n_tx):
        raise ValueError(f"h_est must be {(n_users, n_tx)}, got {h_est.shape}")
    if s.shape != (n_users,):
        raise ValueError(f"s must have length {n_users}")
    step = float(
        data.get("step", harness.step_for_power(n_tx, bits, power))
    )
    qspec = build_uniform_quantizer(bits, step)
    h_tilde = realify(h_est, np.sqrt(1.0 - eta))
    s_tilde = realify_vec(s)
    c_matrix = lift_matrix(n_tx, qspec)
    instance = sdr.make_lift_instance(h_tilde, s_tilde, c_matrix, eta)
    return instance, qspec


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        data = json.load(fh)
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.error_mode is not None:
        data["error_mode"] = args.error_mode
    if args.lmi_sign is not None:
        data["lmi_sign"] = args.lmi_sign
    cfg = harness.SimConfig.from_dict(data)
    t0 = time.time()
    records = harness.sweep(cfg, workers=args.threads)
    wall = time.time() - t0
    harness.emit_csv(records, args.out)
    meta = harness.sweep_metadata(cfg, wall)
    with open(str(args.out) + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    print(f"wrote {len(records)} records to {args.out} ({wall:.1f}s)")
    return 0


def _cmd_solve(args) -> int:
    instance, qspec = _load_instance(args.instance)
    model = sdr.assemble_robust_model(instance, args.lmi_sign or "corrected")
    solution = sdr.solve_relaxation(model, {"engine": args.engine})
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    x_r, v_hat = sdr.round_solution(
        solution.v_star, instance, qspec.step, n_random=50, rng=rng
    )
    rounded = sdr.sign_vector_objective(v_hat, instance, qspec.step)
    print(f"status           {solution.solver_status}")
    print(f"epsilon          {solution.epsilon:.10g}")
    print(f"kappa            {solution.kappa:.10g}")
    print(f"rounded_objective {rounded:.10g}")
    return 0 if solution.solver_status == sdr.SOLVED_OPTIMAL else 1


def _cmd_oracle(args) -> int:
    instance, qspec = _load_instance(args.instance)
    v_opt, objective = baselines.exhaustive_precoder(instance, qspec.step)
    signs = "".join("+" if v > 0 else "-" for v in v_opt)
    print(f"objective {objective:.10g}")
    print(f"v_opt     {signs}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="quantmimo",
        description="Robust SDR precoding for coarsely quantized MU-MIMO",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a Monte Carlo BER sweep")
    p_sweep.add_argument("--config", required=True, help="JSON sweep config")
    p_sweep.add_argument("--out", default="sweep.csv", help="output CSV path")
    p_sweep.add_argument("--seed", type=int, help="override master seed")
    p_sweep.add_argument("--threads", type=int, default=1,
                         help="worker processes")
    p_sweep.add_argument("--error-mode", choices=("bounded", "gaussian"))
    p_sweep.add_argument("--lmi-sign", choices=("corrected", "as-printed"))
    p_sweep.set_defaults(func=_cmd_sweep)

    p_solve = sub.add_parser("solve", help="solve one robust instance")
    p_solve.add_argument("--instance", required=True)
    p_solve.add_argument("--seed", type=int, help="rounding seed")
    p_solve.add_argument("--engine", choices=("fast", "generic"),
                         default="fast")
    p_solve.add_argument("--lmi-sign", choices=("corrected", "as-printed"))
    p_solve.set_defaults(func=_cmd_solve)

    p_oracle = sub.add_parser("oracle", help="exhaustive baseline")
    p_oracle.add_argument("--instance", required=True)
    p_oracle.set_defaults(func=_cmd_oracle)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
