"""Deterministic scheduling simulator: clusters, HEFT, billing, stats."""

from .billing import BillingModel, cost_deviation_pct, predict_cost
from .clusters import (
    DEFAULT_BANDWIDTH_BPS,
    DEFAULT_POOL,
    ClusterSpec,
    Splitmix64,
    generate_clusters,
    make_cluster,
)
from .dag import WorkflowDag, load_dag_csv, merge_workflows, topological_order
from .heft import Assignment, Schedule, execute_with_actuals, heft, upward_ranks, validate_schedule
from .stats import makespan_deviation_stats, nearest_rank_percentile

__all__ = [
    "Assignment",
    "BillingModel",
    "ClusterSpec",
    "DEFAULT_BANDWIDTH_BPS",
    "DEFAULT_POOL",
    "Schedule",
    "Splitmix64",
    "WorkflowDag",
    "cost_deviation_pct",
    "execute_with_actuals",
    "generate_clusters",
    "heft",
    "load_dag_csv",
    "make_cluster",
    "makespan_deviation_stats",
    "merge_workflows",
    "nearest_rank_percentile",
    "predict_cost",
    "topological_order",
    "upward_ranks",
    "validate_schedule",
]
