"""Probabilistic pulse-position modulation (PPPM) over lossy bosonic channels.

Rates of one-/two-pulse Hadamard-type codes decoded with vacuum-or-pulse
detectors, their baselines, and a Monte Carlo model of the receiver.
"""
__version__ = "0.1.0"

from .codebook import (
    Codebook,
    Message,
    enumerate_messages,
    hadamard_matrix,
    message_prior,
    message_to_pulse_state,
    message_to_transmit_state,
)
from .detectors import (
    QuadratureError,
    TwoClickStats,
    VpStats,
    helstrom_error,
    two_click_probabilities,
    two_click_probabilities_finite_T,
    vp_probabilities,
    vp_probabilities_finite_T,
)
from .linear_optics import (
    ModeAmplitudes,
    attenuate,
    beam_splitter,
    displace,
    hadamard_butterfly,
    total_energy,
)
from .rates import (
    ConditionalTable,
    OutcomeSymbol,
    RateResult,
    build_conditional_table,
    h1,
    h2,
    mutual_information,
    r_dolinar,
    r_hadamard,
    r_holevo_bpsk,
    r_pppm_closed,
    r_pppm_opt,
)
