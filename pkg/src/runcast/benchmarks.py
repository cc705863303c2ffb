"""Machine microbenchmark profiles and application-specific scores.

A MachineProfile holds the general microbenchmark results for one node
type: single-threaded CPU events/s, a memory score, and sequential
read/write IOPS. Application-specific benchmarks are per-task throughput
scores (higher = faster). Running the benchmarks themselves is out of
scope; scores arrive as CSV data.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import (
    BadValue,
    DataError,
    DuplicateKey,
    MissingColumn,
    MissingLocal,
    MultipleLocal,
    NonPositiveScore,
)
from .traces import MachineId

BENCH_COLUMNS = ("machine", "is_local", "cpu_events_per_s", "ram_score", "read_iops", "write_iops")
APP_BENCH_COLUMNS = ("task", "machine", "value")

_TRUE = {"true", "1", "yes"}
_FALSE = {"false", "0", "no", ""}


@dataclass(frozen=True)
class MachineProfile:
    """General microbenchmark scores for one machine type."""

    machine: MachineId
    cpu_events_per_s: float
    ram_score: float
    read_iops: float
    write_iops: float

    def __post_init__(self):
        for name in ("cpu_events_per_s", "ram_score", "read_iops", "write_iops"):
            if getattr(self, name) <= 0:
                raise NonPositiveScore(self.machine, name)


@dataclass(frozen=True)
class AppBenchmark:
    """Task-specific throughput score for one machine (higher = faster)."""

    task: str
    machine: MachineId
    value: float

    def __post_init__(self):
        if self.value <= 0:
            raise NonPositiveScore(self.machine, f"app:{self.task}")


@dataclass(frozen=True)
class ProfileRegistry:
    """All known machine profiles plus the designated local machine."""

    profiles: dict[MachineId, MachineProfile]
    local: MachineId
    app_benchmarks: dict[tuple[str, MachineId], AppBenchmark] = field(default_factory=dict)

    def __post_init__(self):
        if self.local not in self.profiles:
            raise MissingLocal(f"local machine {self.local!r} has no profile")

    @property
    def local_profile(self) -> MachineProfile:
        return self.profiles[self.local]

    def profile(self, machine: MachineId) -> MachineProfile:
        try:
            return self.profiles[machine]
        except KeyError:
            raise DataError(f"unknown machine {machine!r}") from None

    def machines(self) -> list[MachineId]:
        return sorted(self.profiles)

    def targets(self) -> list[MachineId]:
        """All non-local machines, sorted."""
        return [m for m in self.machines() if m != self.local]

    def app_value(self, task: str, machine: MachineId) -> float | None:
        bench = self.app_benchmarks.get((task, machine))
        return None if bench is None else bench.value

    def app_tasks(self) -> list[str]:
        return sorted({task for task, _ in self.app_benchmarks})


def io_score(profile: MachineProfile) -> float:
    """Scalar I/O score of a machine: arithmetic mean of read and write IOPS.

    The mean always lies between the two IOPS fields and is symmetric in
    read/write-heavy workloads.
    """
    return (profile.read_iops + profile.write_iops) / 2.0


def _parse_bool(value: str, row: int) -> bool:
    lowered = value.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise BadValue(row, "is_local", f"not a boolean: {value!r}")


def _parse_score(value: str, row: int, column: str, machine: str) -> float:
    try:
        parsed = float(value)
    except ValueError:
        raise BadValue(row, column, f"not a number: {value!r}") from None
    if parsed <= 0:
        raise NonPositiveScore(machine, column)
    return parsed


def load_profiles(path: str | Path, app_path: str | Path | None = None,
                  invert_app_values: bool = False) -> ProfileRegistry:
    """Load machine profiles, and optionally app benchmarks, from CSV.

    The benchmark CSV header is `machine,is_local,cpu_events_per_s,
    ram_score,read_iops,write_iops`; exactly one row must be flagged
    local. App benchmark CSVs (`task,machine,value`) carry throughput
    scores; pass invert_app_values=True when the file holds time-like
    values instead (they are stored as reciprocals).
    """
    path = Path(path)
    profiles: dict[MachineId, MachineProfile] = {}
    local: MachineId | None = None
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise MissingColumn(BENCH_COLUMNS[0]) from None
        for name in BENCH_COLUMNS:
            if name not in header:
                raise MissingColumn(name)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            record = dict(zip(header, row))
            machine = record["machine"]
            if not machine:
                raise BadValue(lineno, "machine", "must be nonempty")
            if machine in profiles:
                raise DuplicateKey(machine)
            profiles[machine] = MachineProfile(
                machine=machine,
                cpu_events_per_s=_parse_score(record["cpu_events_per_s"], lineno, "cpu_events_per_s", machine),
                ram_score=_parse_score(record["ram_score"], lineno, "ram_score", machine),
                read_iops=_parse_score(record["read_iops"], lineno, "read_iops", machine),
                write_iops=_parse_score(record["write_iops"], lineno, "write_iops", machine),
            )
            if _parse_bool(record["is_local"], lineno):
                if local is not None:
                    raise MultipleLocal(f"both {local!r} and {machine!r} are flagged local")
                local = machine
    if local is None:
        raise MissingLocal("no benchmark row is flagged as the local machine")

    app_benchmarks: dict[tuple[str, MachineId], AppBenchmark] = {}
    if app_path is not None:
        app_benchmarks = _load_app_benchmarks(Path(app_path), profiles, invert_app_values)
    return ProfileRegistry(profiles=profiles, local=local, app_benchmarks=app_benchmarks)


def _load_app_benchmarks(path: Path, profiles: dict[MachineId, MachineProfile],
                         invert: bool) -> dict[tuple[str, MachineId], AppBenchmark]:
    benches: dict[tuple[str, MachineId], AppBenchmark] = {}
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise MissingColumn(APP_BENCH_COLUMNS[0]) from None
        for name in APP_BENCH_COLUMNS:
            if name not in header:
                raise MissingColumn(name)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            record = dict(zip(header, row))
            task, machine = record["task"], record["machine"]
            if machine not in profiles:
                raise BadValue(lineno, "machine", f"unknown machine {machine!r}")
            key = (task, machine)
            if key in benches:
                raise DuplicateKey(key)
            value = _parse_score(record["value"], lineno, "value", machine)
            if invert:
                value = 1.0 / value
            benches[key] = AppBenchmark(task=task, machine=machine, value=value)
    return benches


def default_machines_path() -> Path:
    """Path of the bundled six-machine benchmark fixture."""
    return Path(resources.files("runcast").joinpath("fixtures/machines.csv"))
