"""Two-mode BEC interferometer: spin moments, planar squeezing, steering criteria and depth calibration."""

__version__ = "0.1.0"

from .bounds import (
    BoundEntry,
    BoundTable,
    SolverSettings,
    asymptotic_check,
    build_table,
    interpolate_c_tilde,
    reference_table,
    solve_c_s,
    solve_zeta2,
)
from .closed_form import ClosedFormMoments, closed_form_moments, crosscheck
from .criteria import (
    CriteriaReport,
    evaluate_criteria,
    interferometer_output,
    optimal_angle,
    rotated_spins,
)
from .depth import DepthResult, infer_depth_entanglement, infer_depth_pqs, infer_depth_steering
from .exceptions import ConsistencyError, ConvergenceError
from .fock import ModelParams, TwoModeState, beam_splitter_state, evolve, phase_exponent
from .moments import SpinMoments, dense_oracle_moments, moments_from_state, variance
from .sweep import SearchSettings, SweepResult, optimize_over_t, scan_time, table_one

__all__ = [
    "BoundEntry", "BoundTable", "ClosedFormMoments", "ConsistencyError", "ConvergenceError",
    "CriteriaReport", "DepthResult", "ModelParams", "SearchSettings", "SolverSettings",
    "SpinMoments", "SweepResult", "TwoModeState", "asymptotic_check", "beam_splitter_state",
    "build_table", "closed_form_moments", "crosscheck", "dense_oracle_moments",
    "evaluate_criteria", "evolve", "infer_depth_entanglement", "infer_depth_pqs",
    "infer_depth_steering", "interferometer_output", "interpolate_c_tilde", "moments_from_state",
    "optimal_angle", "optimize_over_t", "phase_exponent", "reference_table", "rotated_spins",
    "scan_time", "solve_c_s", "solve_zeta2", "table_one", "variance",
]
