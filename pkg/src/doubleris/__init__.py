"""Simulation and closed-form analysis of phase-noise-impaired double-RIS
multiuser MISO downlinks with spatially correlated fading."""

from .analytics import (
    EtaInputs,
    achievable_rate,
    channel_covariance,
    closed_form_rates,
    eta_k,
    eta_k_optimal,
    general_hardening_sinr,
    sinr_lower_bound,
)
from .channel_model import (
    ChannelRealization,
    LinkGains,
    PhaseConfig,
    SystemConfig,
    build_correlation_set,
    config_digest,
    derive_geometry,
    draw_channels,
    effective_channel,
    link_gains,
    path_gain,
)
from .correlation import (
    BsCorrelationSpec,
    CorrelationSet,
    RisGeometry,
    build_bs_correlation,
    build_ris_correlation,
    phase_weighted_trace,
)
from .matrix_core import hermitian_psd_sqrt, trace_product
from .montecarlo import (
    covariance_estimate,
    ergodic_rate_estimate,
    moment_bound_estimate,
    mrt_precoder,
    rate_report,
    simulate,
)
from .rbd import evaluate_design, optimal_phase_config, random_phase_config
from .stochastic import PhaseNoiseModel, SeededRng, sample_complex_gaussian, sample_von_mises, vm_cf

__version__ = "0.1.0"
