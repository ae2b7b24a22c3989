"""Tomography from repeated uses of one informationally incomplete instrument."""

from .instrument import (
    DensityOperator,
    Instrument,
    QuantumOperation,
    apply,
    apply_dual,
    make_example1,
    make_example2,
    make_luders,
    make_nqubit_shift,
    make_projective,
    make_qudit_custom,
    make_qudit_mub,
    sic_qubit_effects,
    validate,
)
from .linalg import Tolerances, hermitian_eigen, kron, psd_sqrt, span_rank, vec
from .optimize import InfeasibleScanError, ScanResult, optimize_family, refine_minimum, scan_condition_number
from .recon import (
    NotInformationallyCompleteError,
    ReconstructionResult,
    TrajectoryBatch,
    reconstruct,
    sample_trajectories,
    trace_distance,
)
from .sequential import (
    EffectSet,
    GramReport,
    LeafCapExceeded,
    collective_effects,
    condition_number,
    gram_report,
    ic_search,
    min_depth_bound,
    outcome_distribution,
)

__version__ = "0.1.0"
