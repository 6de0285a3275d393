"""Information rates of a sparse Gaussian linear channel.

Two asymptotic routes to the per-symbol mutual information ``I1`` (a scalar
replica fixed point and a saddle-point formula for general pattern laws), the
closed-form known-support rate ``I2``, small-n Monte-Carlo references, and the
coding, wiretap and multiple-access rates composed from them. Nats throughout.
"""
__version__ = "0.1.0"

from .errors import ConfigError, ConvergenceError, DomainError, NumericError, SizeError, SparseRatesError
from .model import ChannelParams, SparsityLaw, binary_entropy, law_derivative, memoryless_law, prior_magnetization
from .scalar_channel import ScalarChannel, scalar_mi, scalar_mmse
from .replica import ReplicaSolution, i1_replica, solve_eta
from .rigorous import SaddlePoint, aux_values, i1_rigorous, selection_criterion, solve_saddle, t_func
from .shannon_transform import I2Report, f_mp, i2, i2_high_snr
from .rates import (
    RateReport,
    Scenario,
    WiretapParams,
    i1,
    mac_rate,
    memoryless_optimality_scan,
    rate_causal_state,
    rate_controlled,
    rate_pattern_info,
    rate_unknown_pattern,
    secrecy_controlled,
    secrecy_uncontrolled,
    secrecy_unavailable,
)
from .oracle import OracleEstimate, mc_i1, mc_i2, sample_instance
