"""Time-encoded communication between moving frames.

Max-entropy codebooks, Lorentz dilation of symbol durations, the divergence
and curvature of the dilated distribution, informational free energy and a
seeded Monte Carlo harness.
"""

from .codebook import (
    Codebook,
    EncodingModel,
    FigureModel,
    entropy_per_symbol,
    figure_model,
    info_temperature,
    log_multiplicity,
    log_partition_function,
    max_entropy_distribution,
    mean_duration,
    partition_function,
    solve_beta,
    transmission_energy,
)
from .errors import *  # noqa: F401,F403
from .infogeo import (
    cramer_rao_bound,
    cross_entropy,
    fisher_finite_difference,
    fisher_paper,
    kld,
    kld_closed_form,
    kld_exact,
    kld_reverse,
    kld_simplified,
)
from .relativity import (
    FrameContext,
    dilation_ratio,
    gamma_first_derivative,
    gamma_second_derivative,
    lorentz_gamma,
    receiver_distribution,
    receiver_durations,
    speed_from_gamma,
)
from .thermo import (
    KldMode,
    Regime,
    classify_regime,
    critical_velocity_approx,
    critical_velocity_consistent,
    critical_velocity_paper,
    free_energy_receiver,
    free_energy_sender,
    free_energy_zero_crossing,
)

__version__ = "0.1.0"
