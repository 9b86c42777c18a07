"""Deterministic remote state preparation over a seven-qubit channel.

The package builds the entangled resource state, runs the two-round
measurement protocol with its recovery table, evolves the channel under
six single-qubit Kraus noise models (exact and two-term truncated), and
quantifies both fidelity degradation and the two standard attack models.
"""

from .linalg import (
    CapacityError,
    DensityReport,
    apply_to_qubits,
    basis_state,
    check_density,
    ket,
    partial_trace,
    pure_density,
    tensor,
)
from .channel import (
    CORRELATED_PAIRS,
    QUBIT_PARTY,
    GroupedFormReport,
    bell_pairs,
    borras_state,
    build_channel,
    factor_block,
    factor_states,
    grouped_triplets,
    sender_basis_vectors,
    verify_factorization,
    verify_grouped_form,
)
from .protocol import (
    ALL_OUTCOME_KEYS,
    AliceBasis,
    ImpossibleBranchError,
    OutcomeKey,
    ProtocolTranscript,
    RecoveryRule,
    TableReport,
    TargetState,
    UnknownOutcomeError,
    alice_basis,
    enumerate_branches,
    gate_matrix,
    measure_projective,
    recovery_sequence,
    recovery_table,
    run_rsp,
    table_report,
)
from .noise import (
    ALL_QUBITS,
    TRANSMITTED_QUBITS,
    EvolutionModel,
    KrausChannel,
    NoiseKind,
    NoiseSpec,
    TrajectoryEstimate,
    UnsupportedConfigurationError,
    apply_noise,
    damping_terminal_term,
    evolved_state,
    kraus_operators,
    noisy_rsp_output,
    trajectory_estimate,
    truncated_channel_state,
)
from .analysis import (
    AttackParams,
    DetectionEstimate,
    DiscrepancyEntry,
    InsideAttackResult,
    OutsideStrategy,
    QubitScope,
    SweepConfig,
    SweepModel,
    SweepRow,
    analytic_detection_probability,
    averaged_fidelity,
    branch_fidelity,
    discrepancy_report,
    fidelity,
    fidelity_sweep,
    inside_attack,
    outside_attack_sim,
    purity,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_OUTCOME_KEYS",
    "ALL_QUBITS",
    "AliceBasis",
    "AttackParams",
    "CORRELATED_PAIRS",
    "CapacityError",
    "DensityReport",
    "DetectionEstimate",
    "DiscrepancyEntry",
    "EvolutionModel",
    "GroupedFormReport",
    "ImpossibleBranchError",
    "InsideAttackResult",
    "KrausChannel",
    "NoiseKind",
    "NoiseSpec",
    "OutcomeKey",
    "OutsideStrategy",
    "ProtocolTranscript",
    "QUBIT_PARTY",
    "QubitScope",
    "RecoveryRule",
    "SweepConfig",
    "SweepModel",
    "SweepRow",
    "TRANSMITTED_QUBITS",
    "TableReport",
    "TargetState",
    "TrajectoryEstimate",
    "UnknownOutcomeError",
    "UnsupportedConfigurationError",
    "alice_basis",
    "analytic_detection_probability",
    "apply_noise",
    "apply_to_qubits",
    "averaged_fidelity",
    "basis_state",
    "bell_pairs",
    "borras_state",
    "branch_fidelity",
    "build_channel",
    "check_density",
    "damping_terminal_term",
    "discrepancy_report",
    "enumerate_branches",
    "evolved_state",
    "factor_block",
    "factor_states",
    "fidelity",
    "fidelity_sweep",
    "gate_matrix",
    "grouped_triplets",
    "inside_attack",
    "ket",
    "kraus_operators",
    "measure_projective",
    "noisy_rsp_output",
    "outside_attack_sim",
    "partial_trace",
    "pure_density",
    "purity",
    "recovery_sequence",
    "recovery_table",
    "run_rsp",
    "sender_basis_vectors",
    "table_report",
    "tensor",
    "trajectory_estimate",
    "truncated_channel_state",
    "verify_factorization",
    "verify_grouped_form",
    "__version__",
]
