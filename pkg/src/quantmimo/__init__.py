"""Robust SDR precoding for coarsely quantized MU-MIMO downlinks."""

from .channel import (
    ChannelRealization,
    RealExpansion,
    compose_channel,
    draw_realization,
    expand,
    realify,
    realify_vec,
    sample_channel_estimate,
    sample_error,
    trial_rng,
)
from .quantizer import (
    QuantizerSpec,
    build_uniform_quantizer,
    decomposition_weights,
    lift_matrix,
    quantize,
    reachable_labels,
)
from .sdp import (
    LmiBlock,
    SdpProblem,
    SdpResult,
    check_psd,
    dump_problem,
    kkt_residuals,
    load_problem,
    solve,
)
from .sdr import (
    LiftedSolution,
    LiftInstance,
    PrecodingFactorError,
    RobustSdpModel,
    assemble_robust_model,
    augmented_channel,
    complexify,
    lift_objective_matrix,
    make_lift_instance,
    recover_precoding_factor,
    round_solution,
    sign_vector_objective,
    solve_relaxation,
)
from .baselines import (
    PrecoderOutput,
    exhaustive_precoder,
    quantized_zf,
    zf_precoder,
)
from .modem import ConstellationSpec, constellation, demodulate, modulate
from .harness import (
    BerRecord,
    SimConfig,
    emit_csv,
    load_records,
    run_trial,
    step_for_power,
    sweep,
)

__version__ = "0.1.0"
