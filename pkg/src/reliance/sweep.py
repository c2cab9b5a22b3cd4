"""Parameter sweeps and sensitivity analysis over scenario parameters.

A sweep replaces one numeric leaf of the scenario (addressed by the dot-path
used in scenario JSON, e.g. ``"policy.p_accept"``) with each value of an
inclusive, equally spaced grid, validates every resulting scenario up front,
and evaluates the closed form at each point.  Sensitivities are exact
hand-derived partials, guarded in-process by central finite differences.
"""

from __future__ import annotations

import copy
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

from .analytic import accuracy_from_parameters, accuracy_partials, evaluate, free_parameters
from .model import (
    Scenario,
    ScenarioValidationError,
    scenario_to_dict,
    validate_scenario,
)

# Central-difference step and required agreement for the sensitivity guard.
FD_STEP = 1e-6
FD_TOLERANCE = 1e-6


class SweepError(ValueError):
    """A sweep specification cannot be evaluated as requested."""


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional sweep: which parameter to vary, over what grid.

    The grid is inclusive of both endpoints and equally spaced; `steps` is
    the number of grid points and must be at least 2.
    """

    base: Scenario
    parameter_path: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise SweepError(f"steps must be >= 2, got {self.steps}")

    def grid(self) -> list[float]:
        width = (self.stop - self.start) / (self.steps - 1)
        return [self.start + i * width for i in range(self.steps)]


@dataclass(frozen=True)
class SweepSeries:
    """Accuracies along a sweep grid, with the two routine reference lines."""

    parameter_path: str
    parameter_values: tuple[float, ...]
    accuracies: tuple[float, ...]
    unaided_reference: float
    routine_accept_reference: float

    def __post_init__(self):
        if len(self.parameter_values) != len(self.accuracies):
            raise ValueError("parameter_values and accuracies must have equal length")

    def to_dict(self) -> dict[str, Any]:
        return {
            "parameter_path": self.parameter_path,
            "parameter_values": list(self.parameter_values),
            "accuracies": list(self.accuracies),
            "unaided_reference": self.unaided_reference,
            "routine_accept_reference": self.routine_accept_reference,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SweepSeries":
        return cls(
            parameter_path=data["parameter_path"],
            parameter_values=tuple(data["parameter_values"]),
            accuracies=tuple(data["accuracies"]),
            unaided_reference=data["unaided_reference"],
            routine_accept_reference=data["routine_accept_reference"],
        )


def _resolve_path(base: Scenario, path: str) -> tuple[str, str]:
    """Split and check a dot-path against the scenario's canonical JSON form."""
    parts = path.split(".")
    canonical = scenario_to_dict(base)
    if len(parts) != 2 or parts[0] not in ("aid", "user", "policy", "dependency"):
        raise SweepError(f"parameter_path {path!r} not recognized")
    section, key = parts
    if key == "type" or key not in canonical[section]:
        raise SweepError(
            f"parameter_path {path!r} not applicable to this scenario "
            f"({section} is {canonical[section].get('type', section)!r})"
        )
    return section, key


def _scenario_at(base: Scenario, section: str, key: str, value: float) -> Scenario:
    raw = copy.deepcopy(scenario_to_dict(base))
    raw[section][key] = value
    return validate_scenario(raw)


def run_sweep(spec: SweepSpec) -> SweepSeries:
    """Evaluate the closed form at each grid point of the sweep.

    Every swept scenario is validated before any evaluation begins; the
    first invalid grid value aborts the whole sweep, by name.
    """
    section, key = _resolve_path(spec.base, spec.parameter_path)
    grid = spec.grid()
    scenarios = []
    for value in grid:
        try:
            scenarios.append(_scenario_at(spec.base, section, key, value))
        except ScenarioValidationError as err:
            raise SweepError(
                f"swept value {value!r} for {spec.parameter_path!r} is invalid: {err}"
            ) from err
    accuracies = tuple(evaluate(s).p_correct_aided for s in scenarios)
    return SweepSeries(
        parameter_path=spec.parameter_path,
        parameter_values=tuple(grid),
        accuracies=accuracies,
        unaided_reference=spec.base.user.p_unaided_correct,
        routine_accept_reference=spec.base.aid.p_advice_correct,
    )


def find_reference_crossing(
    spec: SweepSpec, series: SweepSeries | None = None, tol: float = 1e-9
) -> float | None:
    """Parameter value where the swept accuracy crosses the unaided reference.

    Scans the series for a sign change between adjacent grid points, then
    bisects the analytic evaluation of the swept scenario down to `tol`.
    Returns None when the series never crosses the reference line.
    """
    if series is None:
        series = run_sweep(spec)
    section, key = _resolve_path(spec.base, spec.parameter_path)
    reference = series.unaided_reference

    def gap(value: float) -> float:
        return evaluate(_scenario_at(spec.base, section, key, value)).p_correct_aided - reference

    values = series.parameter_values
    gaps = [acc - reference for acc in series.accuracies]
    for i in range(len(values) - 1):
        if gaps[i] == 0.0:
            return values[i]
        if gaps[i] * gaps[i + 1] < 0.0:
            lo, hi = values[i], values[i + 1]
            g_lo = gaps[i]
            while abs(hi - lo) > tol:
                mid = 0.5 * (lo + hi)
                g_mid = gap(mid)
                if g_mid == 0.0:
                    return mid
                if (g_lo < 0.0) == (g_mid < 0.0):
                    lo, g_lo = mid, g_mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
    if gaps and gaps[-1] == 0.0:
        return values[-1]
    return None


def sensitivity(scenario: Scenario) -> dict[str, float]:
    """Exact partial derivative of aided accuracy per free probability parameter.

    Keys are the scenario-JSON dot-paths of the parameters the active closed
    form reads.  Each hand-derived partial is cross-checked in-process against
    a central finite difference (step 1e-6, agreement 1e-6 absolute); a
    mismatch means an implementation bug and raises ArithmeticError.
    """
    partials = accuracy_partials(scenario)
    values = free_parameters(scenario)
    for name, exact in partials.items():
        up = dict(values)
        down = dict(values)
        up[name] = values[name] + FD_STEP
        down[name] = values[name] - FD_STEP
        estimate = (
            accuracy_from_parameters(scenario, up) - accuracy_from_parameters(scenario, down)
        ) / (2.0 * FD_STEP)
        if abs(estimate - exact) > FD_TOLERANCE:
            raise ArithmeticError(
                f"partial for {name} disagrees with finite difference: "
                f"{exact!r} vs {estimate!r}"
            )
    return partials
