"""Non-uniform MCMC sampling of binary matrices with fixed row and column sums.

Matrices are weighted by the product of per-cell weights over their 1s; two
margin-preserving samplers (checkerboard swap and curveball trades) target
that distribution, and an exact enumeration oracle verifies them on small
instances.
"""

from .chains import (
    ChainConfig,
    ChainCounters,
    Trace,
    WEIGHT_PRESETS,
    load_chain_config,
    preset_weights,
    random_binary_matrix,
    run_chain,
    run_ensemble,
    with_corner_zeros,
    with_random_zeros,
)
from .curveball import TradeProposal, curveball_step, propose_trade, trade_probability
from .matrices import (
    BinaryMatrix,
    CompatibilityError,
    MatrixFormatError,
    MonotonicReport,
    WeightMatrix,
    apply_power,
    check_compatibility,
    compute_margins,
    hamming_distance,
    is_monotonic,
    read_binary_matrix,
    read_weight_matrix,
    require_compatible,
    write_binary_matrix,
    write_weight_matrix,
)
from .oracle import (
    EnumeratedSpace,
    SampleComparison,
    SpaceTooLargeError,
    StateNotInSpaceError,
    balance_residual,
    connectivity,
    diameter,
    empirical_distribution,
    enumerate_space,
    exact_kernel,
    min_swaps,
    stationarity_residual,
)
from .stats import (
    DiagnosticReport,
    STATISTICS,
    StatisticValue,
    c_score,
    diagnose,
    diagonal_divergence,
    empirical_p_value,
    ess,
    evaluate_statistic,
    get_statistic,
    mcse_tukey_hanning,
)
from .swap import SwapProposal, propose_swap, swap_probability, swap_step

__version__ = "0.1.0"

__all__ = [
    "BinaryMatrix",
    "ChainConfig",
    "ChainCounters",
    "CompatibilityError",
    "DiagnosticReport",
    "EnumeratedSpace",
    "MatrixFormatError",
    "MonotonicReport",
    "SampleComparison",
    "SpaceTooLargeError",
    "StateNotInSpaceError",
    "StatisticValue",
    "STATISTICS",
    "SwapProposal",
    "Trace",
    "TradeProposal",
    "WEIGHT_PRESETS",
    "WeightMatrix",
    "apply_power",
    "balance_residual",
    "c_score",
    "check_compatibility",
    "compute_margins",
    "connectivity",
    "curveball_step",
    "diagnose",
    "diagonal_divergence",
    "diameter",
    "empirical_distribution",
    "empirical_p_value",
    "enumerate_space",
    "ess",
    "evaluate_statistic",
    "exact_kernel",
    "get_statistic",
    "hamming_distance",
    "is_monotonic",
    "load_chain_config",
    "mcse_tukey_hanning",
    "min_swaps",
    "preset_weights",
    "propose_swap",
    "propose_trade",
    "random_binary_matrix",
    "read_binary_matrix",
    "read_weight_matrix",
    "require_compatible",
    "run_chain",
    "run_ensemble",
    "stationarity_residual",
    "swap_probability",
    "swap_step",
    "trade_probability",
    "with_corner_zeros",
    "with_random_zeros",
    "write_binary_matrix",
    "write_weight_matrix",
]
