"""Exception types shared across the toolkit.

Two families matter to callers: ConfigError (bad invocation or config,
CLI exit code 2) and DataError (input data violating a documented
contract, CLI exit code 3). Everything else derives from one of these.
"""


class ConfigError(Exception):
    """Invalid configuration or command-line usage."""


class DataError(Exception):
    """Input data violates a documented contract."""


class MissingColumn(DataError):
    def __init__(self, name: str):
        super().__init__(f"missing required column {name!r}")
        self.name = name


class BadValue(DataError):
    def __init__(self, row: int, column: str, reason: str = ""):
        detail = f": {reason}" if reason else ""
        super().__init__(f"bad value in row {row}, column {column!r}{detail}")
        self.row = row
        self.column = column


class DuplicateKey(DataError):
    def __init__(self, key):
        super().__init__(f"duplicate key {key!r}")
        self.key = key


class MixedMachines(DataError):
    """A training trace spans more than one machine."""


class MissingLocal(DataError):
    """No benchmark row is flagged as the local machine."""


class MultipleLocal(DataError):
    """More than one benchmark row is flagged as local."""


class NonPositiveScore(DataError):
    def __init__(self, machine: str, field: str):
        super().__init__(f"benchmark score {field!r} for machine {machine!r} must be > 0")
        self.machine = machine
        self.field = field


class LengthMismatch(DataError):
    """Paired sequences have different lengths."""


class TooFewPoints(DataError):
    """Fewer data points than the operation requires."""


class TooFewRuns(DataError):
    """Fewer task runs than model fitting requires."""


class MixedTasks(DataError):
    """Runs passed to a per-task fit belong to different tasks."""


class TaskMismatch(DataError):
    """Benchmark values paired across machines refer to different tasks."""


class NoFactors(DataError):
    """Median fallback requested but no factors exist for the target."""


class ZeroActual(DataError):
    """Prediction error is undefined for a non-positive actual runtime."""


class EmptyInput(DataError):
    """An aggregation was called on an empty record set."""


class MissingEstimate(DataError):
    def __init__(self, task: str, machine: str):
        super().__init__(f"no runtime estimate for task {task!r} on machine type {machine!r}")
        self.task = task
        self.machine = machine


class MissingActual(DataError):
    def __init__(self, task: str, machine: str):
        super().__init__(f"no actual runtime for task {task!r} on machine {machine!r}")
        self.task = task
        self.machine = machine


class ScheduleInvalid(Exception):
    """A produced schedule failed the independent validity check."""
