"""Cloud billing: rental windows rounded up to the billing granularity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import ConfigError
from ..traces import MachineId
from .heft import Schedule

HOUR = "hour"
MINUTE = "minute"

_UNIT_SECONDS = {HOUR: 3600.0, MINUTE: 60.0}


@dataclass(frozen=True)
class BillingModel:
    granularity: str = HOUR
    price_per_unit: dict[MachineId, float] = field(default_factory=dict)
    default_price: float = 1.0

    def __post_init__(self):
        if self.granularity not in _UNIT_SECONDS:
            raise ConfigError(f"billing granularity must be hour or minute, got {self.granularity!r}")
        for machine, price in self.price_per_unit.items():
            if price <= 0:
                raise ConfigError(f"price for {machine!r} must be > 0")
        if self.default_price <= 0:
            raise ConfigError("default price must be > 0")

    @property
    def unit_seconds(self) -> float:
        return _UNIT_SECONDS[self.granularity]

    def price(self, machine: MachineId) -> float:
        return self.price_per_unit.get(machine, self.default_price)


def predict_cost(schedule: Schedule, billing: BillingModel) -> float:
    """Total rental cost of a schedule.

    Each used node is rented from its first task start to its last task
    finish; the window is rounded up to whole billing units.
    """
    total = 0.0
    for node, intervals in schedule.node_intervals().items():
        duration = intervals[-1][1] - intervals[0][0]
        units = math.ceil(duration / billing.unit_seconds)
        total += units * billing.price(schedule.cluster.nodes[node])
    return total


def cost_deviation_pct(planned: Schedule, realized: Schedule, billing: BillingModel) -> float:
    """Percentage gap between planned-schedule cost and realized cost.

    Positive values mean the prediction overestimated cost.
    """
    predicted = predict_cost(planned, billing)
    actual = predict_cost(realized, billing)
    return (predicted - actual) / actual * 100.0
