"""Minimum-power allocation for backscatter-assisted hybrid NOMA uplinks."""

from ._hnoma import (
    CandidateKind,
    CertificationConflict,
    ConfigError,
    FeasMode,
    ParseError,
    PowerProfile,
    SolveReport,
    SolveStatus,
    SystemInstance,
    bb_solve,
    is_feasible,
    oma_profile,
    oma_total_power,
    rate_in_slot,
    run_figure,
    sample_instance,
    sca_solve,
    solve_two_user,
    total_rate,
)

__all__ = [
    "CandidateKind",
    "CertificationConflict",
    "ConfigError",
    "FeasMode",
    "ParseError",
    "PowerProfile",
    "SolveReport",
    "SolveStatus",
    "SystemInstance",
    "bb_solve",
    "is_feasible",
    "oma_profile",
    "oma_total_power",
    "rate_in_slot",
    "run_figure",
    "sample_instance",
    "sca_solve",
    "solve_two_user",
    "total_rate",
]
