"""Finite-SNR achievable rates and desk-scale simulation for lattice
interference alignment on the same-linear-code modulo MAC."""

from .codes import (
    Codeword,
    LinearCode,
    all_codewords,
    check_linearity,
    code_from_text,
    code_to_text,
    encode,
    load_code,
    messages_dependent,
    sample_code,
    save_code,
)
from .diophantine import (
    Gain,
    admissible_primes,
    best_rational_oracle,
    delta,
    is_prime,
    parse_gain,
    primes_up_to,
)
from .macsim import (
    AMBIGUOUS,
    MacConfig,
    PairDecoder,
    SimResult,
    estimate_error_prob,
    joint_decode,
    mod_mac_channel,
    wilson_interval,
)
from .modarith import (
    GridPoint,
    L,
    Residue,
    grid_add,
    grid_point,
    grid_real,
    grid_scale,
    mod_interval,
)
from .network import (
    ChannelFormatError,
    ChannelMatrix,
    NetworkSimResult,
    align_interference,
    bundled_channel_path,
    example_channel,
    load_channel_file,
    parse_channel_text,
    simulate_network,
    sum_rate_curves,
)
from .powertime import (
    DecodeStep,
    GainAssumption,
    GainOrderingError,
    Schedule,
    build_schedule,
    dof_factor,
    schedule_rate,
)
from .rates import (
    OmegaBreakdown,
    RatePoint,
    db_to_linear,
    default_p_max,
    dependent_message_prob,
    dof_benchmark,
    dof_ratio_scan,
    normalized_rate,
    omega_breakdown,
    random_sym_capacity,
    rate_for_p,
    theorem1_rate,
    theorem2_sym_rate,
    time_sharing_sum_rate,
)

__version__ = "0.1.0"
