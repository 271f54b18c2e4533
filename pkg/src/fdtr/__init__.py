"""fdtr: frequency-domain time-reversal OFDM precoding with
artificial-noise injection in SISO wiretap channels.

Library surface: scenario parameterization, Rayleigh channel sampling,
the transmit chain (spreading, precoding, null-space AN), the receive
chains (legitimate and three eavesdropper decoders), closed-form SINR /
secrecy-rate models, power-split optimization and waterfilling, and the
seeded Monte Carlo harness behind the `fdtr` CLI.
"""

from ._kernels import backend_name
from .analytics import SinrInputs, analytic_sr, component_power, secrecy_rate, sinr_bob, sinr_eve
from .channel import DiagonalChannel, conjugate, sample_channel, trial_rng
from .exceptions import ConvergenceError, DegenerateTrialError, ParameterError
from .harness import (
    ResultRow,
    ScenarioConfig,
    SweepSpec,
    TrialBatch,
    evaluate_batch,
    reproduce_figure,
    run_sweep,
    run_trial,
    simulate_batch,
)
from .rxchain import DecodeComponents, apply_channel, bob_decode, eve_decode
from .scenario import DECODERS, db_to_linear, linear_to_db, noise_variance_from_snr
from .secrecy_opt import (
    WaterfillProblem,
    WaterfillSolution,
    alpha_infinity,
    alpha_opt,
    required_snr_bob,
    required_snr_infinite_eve,
    waterfill,
)
from .txchain import (
    SpreadingMatrix,
    TransmitFrame,
    assemble_transmit,
    build_spreading_matrix,
    despread,
    generate_an,
    spread,
    tr_precode,
)

__version__ = "0.1.0"
