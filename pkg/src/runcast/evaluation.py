"""Prediction-quality metrics: per-task error, MPE, and error CDFs."""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .errors import EmptyInput, ZeroActual

GROUPS = ("machine", "workflow", "method", "all")


@dataclass(frozen=True)
class ErrorRecord:
    workflow: str
    task: str
    machine: str
    method: str
    predicted: float
    actual: float
    error: float


def task_error(predicted: float, actual: float) -> float:
    """Relative prediction error |predicted - actual| / actual.

    Unbounded above; only bounded by 1 for underpredictions of a
    non-negative quantity.
    """
    if actual <= 0:
        raise ZeroActual(f"actual runtime must be > 0, got {actual}")
    return abs(predicted - actual) / actual


def make_record(workflow: str, task: str, machine: str, method: str,
                predicted: float, actual: float) -> ErrorRecord:
    return ErrorRecord(
        workflow=workflow,
        task=task,
        machine=machine,
        method=method,
        predicted=predicted,
        actual=actual,
        error=task_error(predicted, actual),
    )


def median_prediction_error(records: list[ErrorRecord], group_by: str = "all") -> dict[str, float]:
    """Median of the per-record errors inside each group.

    Even-sized groups take the mean of the two middle values. Grouping
    by "all" yields a single entry keyed "all".
    """
    if not records:
        raise EmptyInput("no error records")
    if group_by not in GROUPS:
        raise ValueError(f"group_by must be one of {GROUPS}")
    groups: dict[str, list[float]] = {}
    for record in records:
        key = "all" if group_by == "all" else getattr(record, group_by)
        groups.setdefault(key, []).append(record.error)
    return {key: statistics.median(groups[key]) for key in sorted(groups)}


def error_cdf(records: list[ErrorRecord]) -> list[tuple[float, float]]:
    """Empirical CDF of the errors as a sorted step function.

    Duplicate error values collapse to one step carrying the cumulative
    fraction after them; the final fraction is exactly 1.
    """
    if not records:
        raise EmptyInput("no error records")
    errors = sorted(r.error for r in records)
    n = len(errors)
    points: list[tuple[float, float]] = []
    for i, value in enumerate(errors, start=1):
        if points and points[-1][0] == value:
            points[-1] = (value, i / n)
        else:
            points.append((value, i / n))
    return points
