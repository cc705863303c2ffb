"""Workflow DAGs with per-machine runtimes for simulation.

A WorkflowDag carries, besides the graph structure, two runtime tables:
`actual[task][machine_type]` in seconds, used to execute schedules, and
`predicted[method][task][machine_type]`, used to plan them. Pseudo entry
and exit tasks introduced when merging workflows have zero cost on every
machine and occupy no node.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import BadValue, DataError, MissingColumn
from ..traces import MachineId

DAG_COLUMNS = ("workflow", "from_task", "to_task", "transfer_bytes")

ENTRY = "__entry__"
EXIT = "__exit__"


@dataclass(frozen=True)
class WorkflowDag:
    name: str
    tasks: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]  # (from, to, transfer bytes)
    pseudo: frozenset[str] = frozenset()
    actual: dict[str, dict[MachineId, float]] = field(default_factory=dict)
    predicted: dict[str, dict[str, dict[MachineId, float]]] = field(default_factory=dict)

    def __post_init__(self):
        known = set(self.tasks)
        for src, dst, _ in self.edges:
            if src not in known or dst not in known:
                raise DataError(f"edge ({src!r}, {dst!r}) references unknown task")
        topological_order(self)  # raises on cycles

    @property
    def real_tasks(self) -> list[str]:
        return [t for t in self.tasks if t not in self.pseudo]

    def successors(self) -> dict[str, list[tuple[str, float]]]:
        succ: dict[str, list[tuple[str, float]]] = {t: [] for t in self.tasks}
        for src, dst, transfer in self.edges:
            succ[src].append((dst, transfer))
        return succ

    def predecessors(self) -> dict[str, list[tuple[str, float]]]:
        pred: dict[str, list[tuple[str, float]]] = {t: [] for t in self.tasks}
        for src, dst, transfer in self.edges:
            pred[dst].append((src, transfer))
        return pred


def topological_order(dag: WorkflowDag) -> list[str]:
    """Kahn's algorithm; raises DataError if the graph has a cycle."""
    indegree = {t: 0 for t in dag.tasks}
    succ: dict[str, list[str]] = {t: [] for t in dag.tasks}
    for src, dst, _ in dag.edges:
        indegree[dst] += 1
        succ[src].append(dst)
    queue = deque(sorted(t for t, d in indegree.items() if d == 0))
    order = []
    while queue:
        task = queue.popleft()
        order.append(task)
        for child in succ[task]:
            indegree[child] -= 1
            if indegree[child] == 0:
                queue.append(child)
    if len(order) != len(dag.tasks):
        raise DataError(f"workflow {dag.name!r} contains a cycle")
    return order


def load_dag_csv(path: str | Path) -> dict[str, WorkflowDag]:
    """Load workflow edge lists from CSV, one WorkflowDag per workflow.

    A row with an empty to_task declares an isolated task; otherwise both
    endpoints join the task set.
    """
    path = Path(path)
    edges: dict[str, list[tuple[str, str, float]]] = {}
    tasks: dict[str, set[str]] = {}
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise MissingColumn(DAG_COLUMNS[0]) from None
        for name in DAG_COLUMNS:
            if name not in header:
                raise MissingColumn(name)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            record = dict(zip(header, row))
            workflow, src, dst = record["workflow"], record["from_task"], record["to_task"]
            if not workflow or not src:
                raise BadValue(lineno, "from_task", "workflow and from_task must be nonempty")
            tasks.setdefault(workflow, set()).add(src)
            edges.setdefault(workflow, [])
            if dst:
                tasks[workflow].add(dst)
                try:
                    transfer = float(record["transfer_bytes"] or 0.0)
                except ValueError:
                    raise BadValue(lineno, "transfer_bytes", record["transfer_bytes"]) from None
                if transfer < 0:
                    raise BadValue(lineno, "transfer_bytes", "must be >= 0")
                edges[workflow].append((src, dst, transfer))
    return {
        wf: WorkflowDag(name=wf, tasks=tuple(sorted(tasks[wf])), edges=tuple(edges[wf]))
        for wf in sorted(tasks)
    }


def with_runtimes(dag: WorkflowDag,
                  actual: dict[str, dict[MachineId, float]],
                  predicted: dict[str, dict[str, dict[MachineId, float]]]) -> WorkflowDag:
    return WorkflowDag(
        name=dag.name,
        tasks=dag.tasks,
        edges=dag.edges,
        pseudo=dag.pseudo,
        actual=actual,
        predicted=predicted,
    )


def merge_workflows(parts: list[tuple[str, WorkflowDag]], name: str = "merged") -> WorkflowDag:
    """Merge workflows into one DAG under shared zero-cost entry/exit tasks.

    Each part gets an alias prefix so the same workflow can appear more
    than once; runtime tables are re-keyed accordingly.
    """
    if not parts:
        raise ValueError("nothing to merge")
    aliases = [alias for alias, _ in parts]
    if len(set(aliases)) != len(aliases):
        raise ValueError("merge aliases must be unique")

    tasks: list[str] = [ENTRY]
    edges: list[tuple[str, str, float]] = []
    actual: dict[str, dict[MachineId, float]] = {}
    predicted: dict[str, dict[str, dict[MachineId, float]]] = {}
    for alias, dag in parts:
        rename = {task: f"{alias}:{task}" for task in dag.tasks}
        tasks.extend(rename[t] for t in dag.tasks)
        edges.extend((rename[s], rename[d], transfer) for s, d, transfer in dag.edges)
        has_pred = {dst for _, dst, _ in dag.edges}
        has_succ = {src for src, _, _ in dag.edges}
        for task in dag.tasks:
            if task not in has_pred:
                edges.append((ENTRY, rename[task], 0.0))
            if task not in has_succ:
                edges.append((rename[task], EXIT, 0.0))
        for task, table in dag.actual.items():
            actual[rename[task]] = table
        for method, per_task in dag.predicted.items():
            dest = predicted.setdefault(method, {})
            for task, table in per_task.items():
                dest[rename[task]] = table
    tasks.append(EXIT)
    return WorkflowDag(
        name=name,
        tasks=tuple(tasks),
        edges=tuple(edges),
        pseudo=frozenset({ENTRY, EXIT}),
        actual=actual,
        predicted=predicted,
    )
