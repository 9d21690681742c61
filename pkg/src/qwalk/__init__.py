"""Discrete-time quantum walk of a two-level atom on a 1D lattice.

Exact (state vector and density matrix) and Monte Carlo engines for the
coin/shift walk, decoherence channels interpolating to the classical random
walk, site-resolved tomography, time-reversal refocusing and the lattice
transport formulas behind the shift operation.
"""

from .classical import ClassicalWalkSpec, binomial_distribution, classical_sigma, classical_walk_mc
from .decoherence import (
    NoiseModel,
    TrajectoryRng,
    UnsupportedNoiseError,
    dephase_coin,
    quantum_to_classical_scan,
    run_noisy_walk_exact,
    run_trajectories,
    trajectory_final_state,
)
from .operators import (
    COIN_PULSE,
    INIT_PULSE,
    CoinOperator,
    Direction,
    PulseSpec,
    ShiftConvention,
    WalkPlan,
    apply_coin,
    apply_shift,
    hadamard_coin,
    identity_coin,
    inverse_coin,
    rotation_from_pulse,
    run_walk,
    time_reverse,
)
from .state import (
    DensityState,
    PositionDistribution,
    Spin,
    WalkerState,
    WindowError,
    distribution_sigma,
    new_localized,
    position_distribution,
    resize_window,
    site_spin_block,
    spin_vector,
    to_density,
)
from .tomography import (
    TOMOGRAPHY_AXES,
    BlochField,
    PauliAxis,
    RefocusReport,
    bloch_vectors,
    calibrate_refocus,
    consistency_check,
    measure_all_axes,
    measure_axis_population,
    offdiag_protocol,
    reconstruct_bloch,
    refocus_analysis,
    refocus_scan,
    scaling_curve,
)
from .transport import (
    LatticeParams,
    displacement,
    excitation_probability,
    optimal_ramp_times,
    potential_for_state,
)

__version__ = "0.1.0"
