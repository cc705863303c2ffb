"""Insertion-based HEFT scheduling and execution with actual runtimes.

Tasks are prioritized by upward rank (mean execution cost over the
cluster's nodes plus, along the heaviest successor path, mean
communication cost) and assigned, highest rank first among ready tasks,
to the node that finishes them earliest. The earliest-finish search is
insertion-based: a task may slot into an idle gap between two already
scheduled tasks when it fits entirely.

Communication between distinct nodes takes transfer_bytes * 8 over the
bottleneck of the two node bandwidths; co-located tasks communicate for
free. Rank computation, which cannot know placements yet, averages over
the cluster's pairwise link bandwidths.
"""

from __future__ import annotations

import math
from bisect import insort
from dataclasses import dataclass

from ..errors import MissingEstimate, ScheduleInvalid
from ..traces import MachineId
from .clusters import ClusterSpec
from .dag import WorkflowDag

_EPS = 1e-9


@dataclass(frozen=True)
class Assignment:
    node: int | None  # index into cluster.nodes; None for pseudo tasks
    start: float
    finish: float


@dataclass(frozen=True)
class Schedule:
    assignments: dict[str, Assignment]
    makespan: float
    cluster: ClusterSpec

    def node_intervals(self) -> dict[int, list[tuple[float, float, str]]]:
        """Per-node (start, finish, task) intervals, ordered by start."""
        table: dict[int, list[tuple[float, float, str]]] = {}
        for task, asg in self.assignments.items():
            if asg.node is None:
                continue
            table.setdefault(asg.node, []).append((asg.start, asg.finish, task))
        for intervals in table.values():
            intervals.sort()
        return table


def _comm_time(transfer_bytes: float, cluster: ClusterSpec,
               src: int | None, dst: int | None) -> float:
    if transfer_bytes <= 0 or src is None or dst is None or src == dst:
        return 0.0
    link = min(cluster.bandwidth_bps[src], cluster.bandwidth_bps[dst])
    return transfer_bytes * 8.0 / link


def _mean_link_bandwidth(cluster: ClusterSpec) -> float:
    if cluster.size < 2:
        return math.inf
    total, pairs = 0.0, 0
    for i in range(cluster.size):
        for j in range(i + 1, cluster.size):
            total += min(cluster.bandwidth_bps[i], cluster.bandwidth_bps[j])
            pairs += 1
    return total / pairs


def _estimate(estimates, task: str, machine: MachineId) -> float:
    try:
        return estimates[task][machine]
    except KeyError:
        raise MissingEstimate(task, machine) from None


def upward_ranks(dag: WorkflowDag, cluster: ClusterSpec, estimates) -> dict[str, float]:
    """Task priority: mean cost plus max successor (comm + rank) path."""
    mean_bw = _mean_link_bandwidth(cluster)
    succ = dag.successors()
    ranks: dict[str, float] = {}
    from .dag import topological_order

    for task in reversed(topological_order(dag)):
        if task in dag.pseudo:
            mean_cost = 0.0
        else:
            costs = [_estimate(estimates, task, mtype) for mtype in cluster.nodes]
            mean_cost = sum(costs) / len(costs)
        best_child = 0.0
        for child, transfer in succ[task]:
            mean_comm = 0.0 if mean_bw == math.inf else transfer * 8.0 / mean_bw
            best_child = max(best_child, mean_comm + ranks[child])
        ranks[task] = mean_cost + best_child
    return ranks


def _earliest_slot(intervals: list[tuple[float, float, str]], ready: float,
                   duration: float) -> float:
    """Earliest start >= ready on a node, allowing insertion into gaps."""
    prev_finish = 0.0
    for start, finish, _ in intervals:
        candidate = max(ready, prev_finish)
        if candidate + duration <= start + _EPS:
            return candidate
        prev_finish = finish
    return max(ready, prev_finish)


def heft(dag: WorkflowDag, cluster: ClusterSpec, estimates) -> Schedule:
    """Plan the DAG on the cluster using the given per-type estimates.

    `estimates` maps task -> machine type -> seconds. Ties in rank fall
    back to task name and ties in finish time to node index, so the
    schedule is a pure function of its inputs.
    """
    ranks = upward_ranks(dag, cluster, estimates)
    pred = dag.predecessors()
    succ = dag.successors()
    assignments: dict[str, Assignment] = {}
    busy: dict[int, list[tuple[float, float, str]]] = {i: [] for i in range(cluster.size)}

    remaining = {task: len(pred[task]) for task in dag.tasks}
    ready = [task for task in dag.tasks if remaining[task] == 0]
    while ready:
        ready.sort(key=lambda t: (-ranks[t], t))
        task = ready.pop(0)

        if task in dag.pseudo:
            finish = max((assignments[p].finish for p, _ in pred[task]), default=0.0)
            assignments[task] = Assignment(node=None, start=finish, finish=finish)
        else:
            best: tuple[float, int, float] | None = None  # (finish, node, start)
            for node, mtype in enumerate(cluster.nodes):
                cost = _estimate(estimates, task, mtype)
                arrival = 0.0
                for parent, transfer in pred[task]:
                    parent_asg = assignments[parent]
                    arrival = max(
                        arrival,
                        parent_asg.finish + _comm_time(transfer, cluster, parent_asg.node, node),
                    )
                start = _earliest_slot(busy[node], arrival, cost)
                finish = start + cost
                if best is None or finish < best[0] - _EPS:
                    best = (finish, node, start)
            finish, node, start = best
            assignments[task] = Assignment(node=node, start=start, finish=finish)
            insort(busy[node], (start, finish, task))

        for child, _ in succ[task]:
            remaining[child] -= 1
            if remaining[child] == 0:
                ready.append(child)

    if len(assignments) != len(dag.tasks):
        raise ScheduleInvalid("scheduling did not reach every task")
    makespan = max((a.finish for t, a in assignments.items() if t not in dag.pseudo), default=0.0)
    return Schedule(assignments=assignments, makespan=makespan, cluster=cluster)


def execute_with_actuals(schedule: Schedule, dag: WorkflowDag) -> Schedule:
    """Re-time a planned schedule with actual runtimes.

    The task-to-node mapping and the per-node task order are kept fixed;
    start and finish times are recomputed respecting both DAG precedence
    and the node-local order.
    """
    cluster = schedule.cluster
    pred = dag.predecessors()

    chain_prev: dict[str, str] = {}
    for intervals in schedule.node_intervals().values():
        for before, after in zip(intervals, intervals[1:]):
            chain_prev[after[2]] = before[2]

    blockers: dict[str, int] = {}
    dependents: dict[str, list[str]] = {}
    for task in dag.tasks:
        deps = [p for p, _ in pred[task]]
        if task in chain_prev:
            deps.append(chain_prev[task])
        blockers[task] = len(deps)
        for dep in deps:
            dependents.setdefault(dep, []).append(task)

    assignments: dict[str, Assignment] = {}
    queue = sorted(t for t in dag.tasks if blockers[t] == 0)
    while queue:
        task = queue.pop(0)
        planned = schedule.assignments[task]
        start = 0.0
        for parent, transfer in pred[task]:
            parent_asg = assignments[parent]
            start = max(
                start,
                parent_asg.finish + _comm_time(transfer, cluster, parent_asg.node, planned.node),
            )
        if task in chain_prev:
            start = max(start, assignments[chain_prev[task]].finish)
        if task in dag.pseudo:
            cost = 0.0
        else:
            cost = _estimate(dag.actual, task, cluster.nodes[planned.node])
        assignments[task] = Assignment(node=planned.node, start=start, finish=start + cost)
        for child in dependents.get(task, []):
            blockers[child] -= 1
            if blockers[child] == 0:
                queue.append(child)

    if len(assignments) != len(dag.tasks):
        raise ScheduleInvalid("realized schedule has a cyclic node/precedence order")
    makespan = max((a.finish for t, a in assignments.items() if t not in dag.pseudo), default=0.0)
    return Schedule(assignments=assignments, makespan=makespan, cluster=cluster)


def validate_schedule(schedule: Schedule, dag: WorkflowDag) -> None:
    """Independent validity pass: precedence and node exclusivity.

    Raises ScheduleInvalid on any violation. Run on every produced
    schedule; it is deliberately separate from the planning logic.
    """
    for task in dag.tasks:
        if task not in schedule.assignments:
            raise ScheduleInvalid(f"task {task!r} missing from schedule")
    for node, intervals in schedule.node_intervals().items():
        for before, after in zip(intervals, intervals[1:]):
            if after[0] < before[1] - _EPS:
                raise ScheduleInvalid(
                    f"tasks {before[2]!r} and {after[2]!r} overlap on node {node}"
                )
    pred = dag.predecessors()
    for task in dag.tasks:
        asg = schedule.assignments[task]
        for parent, transfer in pred[task]:
            parent_asg = schedule.assignments[parent]
            earliest = parent_asg.finish + _comm_time(
                transfer, schedule.cluster, parent_asg.node, asg.node
            )
            if asg.start < earliest - _EPS:
                raise ScheduleInvalid(
                    f"task {task!r} starts before predecessor {parent!r} delivers"
                )
