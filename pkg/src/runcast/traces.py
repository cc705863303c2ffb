"""Task-execution trace model and CSV ingestion.

The trace CSV is the interchange format between workflow engines and this
toolkit: one row per task execution, with the exact header

    workflow,task,instance_id,machine,input_size_uncompressed,
    input_size_compressed,runtime_ms,io_read_bytes,io_write_bytes,
    cpu_pct,peak_memory_bytes

Runtimes are stored as integer milliseconds, sizes and I/O counters as
integer bytes. Optional columns (compressed size, CPU utilisation, peak
memory) use the empty string for "not measured", never zero: zero is a
legal measurement.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import BadValue, DuplicateKey, MissingColumn, MixedMachines

MachineId = str

TRACE_COLUMNS = (
    "workflow",
    "task",
    "instance_id",
    "machine",
    "input_size_uncompressed",
    "input_size_compressed",
    "runtime_ms",
    "io_read_bytes",
    "io_write_bytes",
    "cpu_pct",
    "peak_memory_bytes",
)

_OPTIONAL = {"input_size_compressed", "cpu_pct", "peak_memory_bytes"}

TRAINING = "training"
EVALUATION = "evaluation"


@dataclass(frozen=True)
class TaskRun:
    """One observed execution of one task instance on one machine."""

    workflow: str
    task: str
    instance_id: str
    machine: MachineId
    input_size_uncompressed: int
    runtime_ms: int
    io_read_bytes: int
    io_write_bytes: int
    input_size_compressed: int | None = None
    cpu_pct: float | None = None
    peak_memory_bytes: int | None = None

    def __post_init__(self):
        if self.runtime_ms <= 0:
            raise ValueError("runtime_ms must be > 0")
        for field in ("input_size_uncompressed", "io_read_bytes", "io_write_bytes"):
            if getattr(self, field) < 0:
                raise ValueError(f"{field} must be >= 0")

    @property
    def runtime_s(self) -> float:
        return self.runtime_ms / 1000.0

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.workflow, self.task, self.instance_id, self.machine)


@dataclass(frozen=True)
class TraceSet:
    """A set of task runs, labelled by its role in the pipeline.

    Training traces must come from exactly one machine (the local one);
    evaluation traces may span the whole cluster.
    """

    runs: tuple[TaskRun, ...]
    label: str = TRAINING

    def __post_init__(self):
        if self.label not in (TRAINING, EVALUATION):
            raise ValueError(f"unknown trace label {self.label!r}")
        if self.label == TRAINING:
            machines = {r.machine for r in self.runs}
            if len(machines) > 1:
                raise MixedMachines(
                    f"training trace spans machines {sorted(machines)}; expected one"
                )

    def machines(self) -> list[MachineId]:
        return sorted({r.machine for r in self.runs})

    def workflows(self) -> list[str]:
        return sorted({r.workflow for r in self.runs})


def _parse_int(value: str, row: int, column: str, minimum: int) -> int:
    try:
        parsed = int(value)
    except ValueError:
        raise BadValue(row, column, f"not an integer: {value!r}") from None
    if parsed < minimum:
        raise BadValue(row, column, f"must be >= {minimum}, got {parsed}")
    return parsed


def _parse_float(value: str, row: int, column: str) -> float:
    try:
        parsed = float(value)
    except ValueError:
        raise BadValue(row, column, f"not a number: {value!r}") from None
    if parsed < 0:
        raise BadValue(row, column, f"must be >= 0, got {parsed}")
    return parsed


def parse_trace_csv(path: str | Path, label: str = TRAINING) -> TraceSet:
    """Read a trace CSV into a TraceSet.

    Unparseable rows are rejected with BadValue naming the row and
    column; rows are never skipped silently. Repeated
    (workflow, task, instance_id, machine) keys raise DuplicateKey.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn(TRACE_COLUMNS[0]) from None
        for name in TRACE_COLUMNS:
            if name not in header:
                raise MissingColumn(name)
        if tuple(header) != TRACE_COLUMNS:
            raise BadValue(1, "header", f"expected exact header {','.join(TRACE_COLUMNS)}")

        runs: list[TaskRun] = []
        seen: set[tuple[str, str, str, str]] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(TRACE_COLUMNS):
                raise BadValue(lineno, "row", f"expected {len(TRACE_COLUMNS)} fields, got {len(row)}")
            record = dict(zip(TRACE_COLUMNS, row))
            for name in ("workflow", "task", "instance_id", "machine"):
                if not record[name]:
                    raise BadValue(lineno, name, "must be nonempty")
            runtime = _parse_int(record["runtime_ms"], lineno, "runtime_ms", minimum=1)
            run = TaskRun(
                workflow=record["workflow"],
                task=record["task"],
                instance_id=record["instance_id"],
                machine=record["machine"],
                input_size_uncompressed=_parse_int(
                    record["input_size_uncompressed"], lineno, "input_size_uncompressed", 0
                ),
                runtime_ms=runtime,
                io_read_bytes=_parse_int(record["io_read_bytes"], lineno, "io_read_bytes", 0),
                io_write_bytes=_parse_int(record["io_write_bytes"], lineno, "io_write_bytes", 0),
                input_size_compressed=(
                    _parse_int(record["input_size_compressed"], lineno, "input_size_compressed", 0)
                    if record["input_size_compressed"] != ""
                    else None
                ),
                cpu_pct=(
                    _parse_float(record["cpu_pct"], lineno, "cpu_pct")
                    if record["cpu_pct"] != ""
                    else None
                ),
                peak_memory_bytes=(
                    _parse_int(record["peak_memory_bytes"], lineno, "peak_memory_bytes", 0)
                    if record["peak_memory_bytes"] != ""
                    else None
                ),
            )
            if run.key in seen:
                raise DuplicateKey(run.key)
            seen.add(run.key)
            runs.append(run)
    return TraceSet(runs=tuple(runs), label=label)


def serialize_trace_csv(traces: TraceSet, path: str | Path) -> None:
    """Write a TraceSet back to the exact CSV schema it was parsed from."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRACE_COLUMNS)
        for run in traces.runs:
            writer.writerow(
                [
                    run.workflow,
                    run.task,
                    run.instance_id,
                    run.machine,
                    run.input_size_uncompressed,
                    "" if run.input_size_compressed is None else run.input_size_compressed,
                    run.runtime_ms,
                    run.io_read_bytes,
                    run.io_write_bytes,
                    "" if run.cpu_pct is None else run.cpu_pct,
                    "" if run.peak_memory_bytes is None else run.peak_memory_bytes,
                ]
            )


def group_by_task(traces: TraceSet) -> dict[str, list[TaskRun]]:
    """Group runs by abstract task name, ordered lexicographically.

    Every run appears in exactly one group, so group sizes sum to the
    trace size.
    """
    groups: dict[str, list[TaskRun]] = {}
    for run in traces.runs:
        groups.setdefault(run.task, []).append(run)
    return {task: groups[task] for task in sorted(groups)}


def group_by_workflow_task(traces: TraceSet) -> dict[tuple[str, str], list[TaskRun]]:
    """Group runs by (workflow, task), ordered lexicographically."""
    groups: dict[tuple[str, str], list[TaskRun]] = {}
    for run in traces.runs:
        groups.setdefault((run.workflow, run.task), []).append(run)
    return {key: groups[key] for key in sorted(groups)}


def relabel(traces: TraceSet, label: str) -> TraceSet:
    return replace(traces, label=label)
