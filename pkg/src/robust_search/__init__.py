"""Simulators for Grover search and its phase-error-robust modification."""

from .amplify import (
    SearchProblem,
    TwoLevelModel,
    grover_operator,
    iterate_schedule,
    phase_matching_satisfied,
    predicted_iterations,
    selective_phase,
    tulsi_operator,
    two_level_step,
    uniform_state,
)
from .experiments import (
    RunRecord,
    ScenarioConfig,
    compare_report,
    emit,
    preset,
    run_scenario,
)
from .qcore import DensityMatrix, StateVector, UnitaryOperator

__all__ = [
    "DensityMatrix",
    "RunRecord",
    "ScenarioConfig",
    "SearchProblem",
    "StateVector",
    "TwoLevelModel",
    "UnitaryOperator",
    "compare_report",
    "emit",
    "grover_operator",
    "iterate_schedule",
    "phase_matching_satisfied",
    "predicted_iterations",
    "preset",
    "run_scenario",
    "selective_phase",
    "tulsi_operator",
    "two_level_step",
    "uniform_state",
]

__version__ = "0.1.0"
