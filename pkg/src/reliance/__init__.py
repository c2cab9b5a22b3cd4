"""Accuracy of a decision maker who consults a fallible decision aid.

The library models a single decision as a joint draw of advisor correctness
and would-be user correctness, filtered through a reliance policy (routine
acceptance, routine ignoring, indiscriminate or discriminating attendance,
or self-gated use).  It provides exact closed forms, a seeded Monte Carlo
engine that independently checks them, parameter sweeps with exact
sensitivities, and policy comparison and break-even analyses.
"""

__version__ = "0.1.0"

from .analytic import (
    AnalyticUnavailableError,
    BreakevenResult,
    PolicyComparison,
    PolicyMismatchError,
    breakeven_discrimination,
    compare_policies,
    discriminating_accuracy,
    evaluate,
    indiscriminate_accuracy,
    potential_combined,
    self_gated_accuracy,
)
from .model import (
    AidProfile,
    ConstraintViolation,
    DegradedRateWarning,
    DependencyModel,
    Discriminating,
    Dominant,
    EvalResult,
    Independent,
    Indiscriminate,
    Joint,
    Probability,
    ReliancePolicy,
    RoutineAccept,
    RoutineIgnore,
    Scenario,
    ScenarioValidationError,
    SelfGated,
    UserProfile,
    conditional_user_rates,
    scenario_to_dict,
    validate_scenario,
)
from .simulate import SimEstimate, TrialOutcome, estimate_accuracy, sample_trial
from .sweep import SweepError, SweepSeries, SweepSpec, find_reference_crossing, run_sweep, sensitivity

__all__ = [
    "AidProfile",
    "AnalyticUnavailableError",
    "BreakevenResult",
    "ConstraintViolation",
    "DegradedRateWarning",
    "DependencyModel",
    "Discriminating",
    "Dominant",
    "EvalResult",
    "Independent",
    "Indiscriminate",
    "Joint",
    "PolicyComparison",
    "PolicyMismatchError",
    "Probability",
    "ReliancePolicy",
    "RoutineAccept",
    "RoutineIgnore",
    "Scenario",
    "ScenarioValidationError",
    "SelfGated",
    "SimEstimate",
    "SweepError",
    "SweepSeries",
    "SweepSpec",
    "TrialOutcome",
    "UserProfile",
    "breakeven_discrimination",
    "compare_policies",
    "conditional_user_rates",
    "discriminating_accuracy",
    "estimate_accuracy",
    "evaluate",
    "find_reference_crossing",
    "indiscriminate_accuracy",
    "potential_combined",
    "run_sweep",
    "sample_trial",
    "scenario_to_dict",
    "self_gated_accuracy",
    "sensitivity",
    "validate_scenario",
]
