"""Runtime factors: scaling local predictions to target machines.

A factor f converts a local runtime prediction t into the target-machine
estimate t * f. The general variant weights CPU and I/O benchmark ratios
equally:

    f = 0.5 * cpu_local/cpu_target + 0.5 * io_local/io_target

The application-specific variant divides the local throughput score by
the target's, so a faster target (larger score) yields f < 1. When a
task has no app benchmark but the target has factors for other tasks,
the median of those factors stands in; failing that, the general factor
applies.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, replace

from .benchmarks import AppBenchmark, MachineProfile, ProfileRegistry, io_score
from .errors import NoFactors, TaskMismatch
from .predictor import Prediction
from .traces import MachineId

GENERAL = "general"
APP_SPECIFIC = "app"
MEDIAN_OF_FACTORS = "median"


@dataclass(frozen=True)
class RuntimeFactor:
    """Multiplicative runtime scaling from the local machine to a target."""

    target: MachineId
    factor: float
    source: str
    task: str | None = None

    def __post_init__(self):
        if self.factor <= 0:
            raise ValueError("runtime factor must be > 0")


def general_factor(local: MachineProfile, target: MachineProfile) -> RuntimeFactor:
    """Equal-weight CPU and I/O benchmark ratio between two machines."""
    factor = 0.5 * (local.cpu_events_per_s / target.cpu_events_per_s) \
        + 0.5 * (io_score(local) / io_score(target))
    return RuntimeFactor(target=target.machine, factor=factor, source=GENERAL)


def app_factor(local_val: AppBenchmark, target_val: AppBenchmark) -> RuntimeFactor:
    """Ratio of local to target app-benchmark throughput for one task."""
    if local_val.task != target_val.task:
        raise TaskMismatch(f"{local_val.task!r} vs {target_val.task!r}")
    return RuntimeFactor(
        target=target_val.machine,
        factor=local_val.value / target_val.value,
        source=APP_SPECIFIC,
        task=local_val.task,
    )


def fallback_factor(existing: list[RuntimeFactor]) -> RuntimeFactor:
    """Median of the app-specific factors already known for one target.

    Even counts take the mean of the two middle values. The result is
    permutation-invariant and bounded by the extremes of its inputs.
    """
    if not existing:
        raise NoFactors("median fallback needs at least one existing factor")
    targets = {f.target for f in existing}
    if len(targets) > 1:
        raise ValueError(f"factors span targets {sorted(targets)}; expected one")
    return RuntimeFactor(
        target=existing[0].target,
        factor=statistics.median(f.factor for f in existing),
        source=MEDIAN_OF_FACTORS,
    )


def extrapolate(pred: Prediction, factor: RuntimeFactor) -> Prediction:
    """Scale a local prediction to the factor's target machine.

    Point and both uncertainty bounds scale by the same amount, which
    preserves relative uncertainty and prediction ordering.
    """
    return replace(
        pred,
        point=pred.point * factor.factor,
        lower=pred.lower * factor.factor,
        upper=pred.upper * factor.factor,
        machine=factor.target,
    )


def app_factor_table(registry: ProfileRegistry, target: MachineId) -> dict[str, RuntimeFactor]:
    """All per-task app factors computable for one target machine.

    A task contributes only when it has benchmark values on both the
    local machine and the target.
    """
    table: dict[str, RuntimeFactor] = {}
    for task in registry.app_tasks():
        local_bench = registry.app_benchmarks.get((task, registry.local))
        target_bench = registry.app_benchmarks.get((task, target))
        if local_bench is not None and target_bench is not None:
            table[task] = app_factor(local_bench, target_bench)
    return table


def resolve_factor(registry: ProfileRegistry, task: str, target: MachineId) -> RuntimeFactor:
    """Factor for one task on one target, through the app-specific cascade.

    Exact app factor if the task was benchmarked, else the median of the
    target's existing app factors, else the general factor.
    """
    table = app_factor_table(registry, target)
    if task in table:
        return table[task]
    if table:
        return fallback_factor(list(table.values()))
    return general_factor(registry.local_profile, registry.profile(target))
