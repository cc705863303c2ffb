"""Random heterogeneous cluster generation.

Clusters draw node types i.i.d. from a pool using splitmix64, a small
documented 64-bit mixing generator, so the same seed reproduces the same
clusters on any platform and interpreter. Cluster i of a sweep uses seed
(base seed + i), which keeps per-cluster simulations independent.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigError
from ..traces import MachineId

DEFAULT_POOL = ("A1", "A2", "N1", "N2", "C2")

# Network column of the bundled machine fixture, in bits/s.
DEFAULT_BANDWIDTH_BPS = {
    "Local": 1e9,
    "A1": 1e9,
    "A2": 1e9,
    "N1": 16e9,
    "N2": 16e9,
    "C2": 16e9,
}


class Splitmix64:
    """splitmix64 generator (Steele, Lea and Flood's mixing constants)."""

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self._state = seed & self._MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & self._MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform draw from [0, n) via the multiply-shift reduction."""
        return (self.next_u64() * n) >> 64

    def choice(self, items):
        return items[self.below(len(items))]


@dataclass(frozen=True)
class ClusterSpec:
    """A generated cluster: node machine types and per-node bandwidth."""

    nodes: tuple[MachineId, ...]
    bandwidth_bps: tuple[float, ...]
    seed: int

    def __post_init__(self):
        if len(self.nodes) != len(self.bandwidth_bps):
            raise ValueError("one bandwidth per node required")
        if not self.nodes:
            raise ValueError("cluster must have at least one node")

    @property
    def size(self) -> int:
        return len(self.nodes)


def make_cluster(nodes: list[MachineId], seed: int = 0,
                 bandwidth: dict[MachineId, float] | None = None) -> ClusterSpec:
    table = DEFAULT_BANDWIDTH_BPS if bandwidth is None else bandwidth
    try:
        bw = tuple(float(table[node]) for node in nodes)
    except KeyError as exc:
        raise ConfigError(f"no bandwidth configured for machine type {exc.args[0]!r}") from None
    return ClusterSpec(nodes=tuple(nodes), bandwidth_bps=bw, seed=seed)


def generate_clusters(count: int, size: int, pool: list[MachineId], seed: int,
                      bandwidth: dict[MachineId, float] | None = None) -> list[ClusterSpec]:
    """Generate `count` clusters of `size` nodes drawn uniformly from `pool`."""
    if not pool:
        raise ConfigError("machine pool must be nonempty")
    pool = list(pool)
    clusters = []
    for index in range(count):
        rng = Splitmix64(seed + index)
        nodes = [rng.choice(pool) for _ in range(size)]
        clusters.append(make_cluster(nodes, seed=seed + index, bandwidth=bandwidth))
    return clusters
