"""Exact-diagonalization laboratory for long-time qubit coherence in a chaotic spin chain."""

from .errors import (
    CapacityError,
    CoherelabError,
    ConfigurationError,
    ContractViolation,
    ExtrapolationError,
    InsufficientDataError,
    InvalidSiteError,
    NearSingularityError,
    TruncationError,
)
from .lattice import (
    ChainParams,
    InteractionSpec,
    OperatorMatrix,
    QubitParams,
    build_env_hamiltonian,
    build_local_pauli,
    build_total_hamiltonian,
    model_from_config,
    qubit_blocks,
)
from .eigens import (
    EigenSystem,
    SpectralWindow,
    cached_full_diagonalize,
    degeneracy_check,
    full_diagonalize,
    interior_eigensystem,
    window_select,
)
from .spectral import (
    EthStats,
    SmoothCurve,
    SpacingStats,
    chain_spacing_stats,
    diagonal_elements,
    eth_diagonal_stats,
    eth_offdiag_stats,
    smooth_h_of_E,
    spacing_distribution,
    unfold_spectrum,
    wigner_dyson_cdf,
    wigner_dyson_sample,
)
from .quench import (
    BranchWeights,
    CoarseProfile,
    EnergyShell,
    FQuantities,
    InitialState,
    RdmAverage,
    average_lta_rdm,
    branch_weights,
    coarse_grain,
    energy_shell,
    evolve_rdm,
    f_lta,
    lta_rdm,
    sample_shell_state,
    time_grid_average,
)
from .theory import (
    EtaCoefficients,
    PredictionInput,
    WeakPrediction,
    eta_coefficients,
    predict_generic,
    predict_intermediate,
    predict_weak,
)

__version__ = "0.1.0"
