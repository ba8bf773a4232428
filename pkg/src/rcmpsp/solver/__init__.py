"""Branch-and-bound solver over optional interval variables."""
from .config import ConfigError, Objective, Scenario, SCENARIO_A, SCENARIO_B, SolverConfig, Status
from .schedule import (Claims, Metrics, Schedule, Slot, compute_metrics, evaluate_objective,
                       load_schedule, save_schedule, with_claims)
from .search import InvalidIncumbent, SolveResult, SolveStats, branch, decisions, lower_bound, solve
from .state import Cut, Model, SearchState, propagate

__all__ = [
    "Claims", "ConfigError", "Cut", "InvalidIncumbent", "Metrics", "Model", "Objective",
    "SCENARIO_A", "SCENARIO_B", "Scenario", "Schedule", "SearchState", "Slot", "SolveResult",
    "SolveStats", "SolverConfig", "Status", "branch", "compute_metrics", "decisions",
    "evaluate_objective", "load_schedule", "lower_bound", "propagate", "save_schedule", "solve",
    "with_claims",
]
