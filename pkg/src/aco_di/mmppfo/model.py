"""Wafer-lot scheduling model: lots, orders, capacity cells and schedules."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Hashable, Iterable, Optional

__all__ = [
    "MoveKind",
    "Move",
    "WaferLot",
    "Order",
    "CapacityCell",
    "MmppfoInstance",
    "ScheduleEdge",
    "Schedule",
    "InfeasibleEdge",
    "supported_request",
    "undersupported_request",
    "oversupported_request",
    "capacity_utilization",
    "capacity_waste",
    "mmppfo_fitness",
    "remaining_demand",
    "dynamic_impact_mmppfo",
    "check_schedule",
    "IMPACT_FLOOR",
]

IMPACT_FLOOR = 0.1


class MoveKind(str, Enum):
    STAY = "stay"
    PULL_IN = "pull_in"
    PUSH_OUT = "push_out"
    OFFLOAD = "offload"
    PULL_IN_OFFLOAD = "pull_in+offload"
    PUSH_OUT_OFFLOAD = "push_out+offload"

    @property
    def is_pull_in(self) -> bool:
        return self in (MoveKind.PULL_IN, MoveKind.PULL_IN_OFFLOAD)

    @property
    def is_push_out(self) -> bool:
        return self in (MoveKind.PUSH_OUT, MoveKind.PUSH_OUT_OFFLOAD)

    @classmethod
    def classify(cls, from_week: int, from_fab, to_week: int, to_fab) -> "MoveKind":
        offload = to_fab != from_fab
        if to_week < from_week:
            return cls.PULL_IN_OFFLOAD if offload else cls.PULL_IN
        if to_week > from_week:
            return cls.PUSH_OUT_OFFLOAD if offload else cls.PUSH_OUT
        return cls.OFFLOAD if offload else cls.STAY


@dataclass(frozen=True)
class Move:
    week: int
    fab: Hashable
    kind: MoveKind


@dataclass(frozen=True)
class WaferLot:
    id: int
    quantity: int
    product_group: Hashable
    week: int
    fab: Hashable
    allowed_moves: tuple[Move, ...] = ()

    def __post_init__(self) -> None:
        if self.quantity < 1:
            raise ValueError(f"wafer-lot {self.id}: quantity must be >= 1")
        if not any(mv.kind is MoveKind.STAY and mv.week == self.week and mv.fab == self.fab
                   for mv in self.allowed_moves):
            raise ValueError(f"wafer-lot {self.id}: original slot missing from allowed moves")
        for mv in self.allowed_moves:
            expected = MoveKind.classify(self.week, self.fab, mv.week, mv.fab)
            if mv.kind is not expected:
                raise ValueError(f"wafer-lot {self.id}: move to week {mv.week} fab {mv.fab} "
                                 f"is {expected.value}, not {mv.kind.value}")


@dataclass(frozen=True)
class Order:
    id: int
    demand: int
    week: int
    product_group: Hashable

    def __post_init__(self) -> None:
        if self.demand < 1:
            raise ValueError(f"order {self.id}: demand must be >= 1")


@dataclass(frozen=True)
class CapacityCell:
    product_group: Hashable
    fab: Hashable
    week: int
    capacity: int

    def __post_init__(self) -> None:
        if self.capacity < 0:
            raise ValueError("capacity must be >= 0")

    @property
    def key(self) -> tuple:
        return (self.product_group, self.fab, self.week)


@dataclass(frozen=True)
class MmppfoInstance:
    wafer_lots: tuple[WaferLot, ...]
    orders: tuple[Order, ...]
    capacities: tuple[CapacityCell, ...]

    def __post_init__(self) -> None:
        for what, ids in (("wafer-lot", [l.id for l in self.wafer_lots]),
                          ("order", [o.id for o in self.orders])):
            if len(set(ids)) != len(ids):
                raise ValueError(f"duplicate {what} ids")
        keys = [c.key for c in self.capacities]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate capacity cells")

    @cached_property
    def lot_by_id(self) -> dict[int, WaferLot]:
        return {l.id: l for l in self.wafer_lots}

    @cached_property
    def order_by_id(self) -> dict[int, Order]:
        return {o.id: o for o in self.orders}

    @cached_property
    def cell_by_key(self) -> dict[tuple, CapacityCell]:
        return {c.key: c for c in self.capacities}

    @property
    def total_wafers(self) -> int:
        return sum(l.quantity for l in self.wafer_lots)

    @property
    def total_demand(self) -> int:
        return sum(o.demand for o in self.orders)

    @property
    def total_capacity(self) -> int:
        return sum(c.capacity for c in self.capacities)

    @property
    def tightness(self) -> float:
        return self.total_demand / self.total_capacity if self.total_capacity else float("inf")

    def processing_order(self) -> list[Order]:
        """Orders by ascending commit week, then id."""
        return sorted(self.orders, key=lambda o: (o.week, o.id))


@dataclass(frozen=True)
class ScheduleEdge:
    wafer_lot: int
    order: Optional[int]
    week: int
    fab: Hashable
    kind: MoveKind

    def to_json(self) -> dict:
        return {"lot": self.wafer_lot, "order": self.order, "week": self.week,
                "fab": self.fab, "kind": self.kind.value}

    @classmethod
    def from_json(cls, d: dict) -> "ScheduleEdge":
        return cls(int(d["lot"]), None if d.get("order") is None else int(d["order"]),
                   int(d["week"]), d["fab"], MoveKind(d["kind"]))


class InfeasibleEdge(ValueError):
    pass


@dataclass
class Schedule:
    """A (partial) schedule with incrementally maintained totals."""

    instance: MmppfoInstance
    edges: list[ScheduleEdge] = field(default_factory=list)
    supported: dict = field(default_factory=lambda: defaultdict(int))
    utilization: dict = field(default_factory=lambda: defaultdict(int))
    pull_in_count: int = 0
    push_out_count: int = 0
    _placed: dict = field(default_factory=dict, repr=False)
    _lots: dict = field(default_factory=dict, repr=False)
    _orders: dict = field(default_factory=dict, repr=False)
    _cells: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._lots = self.instance.lot_by_id
        self._orders = self.instance.order_by_id
        self._cells = self.instance.cell_by_key
        pending, self.edges = self.edges, []
        for e in pending:
            self.apply(e)

    def cell_key(self, edge: ScheduleEdge) -> tuple:
        return (self._lots[edge.wafer_lot].product_group, edge.fab, edge.week)

    def is_placed(self, lot_id: int) -> bool:
        return lot_id in self._placed

    def check(self, edge: ScheduleEdge) -> Optional[str]:
        """Why ``edge`` cannot be applied now, or ``None`` if it can."""
        lot = self._lots.get(edge.wafer_lot)
        if lot is None:
            return f"unknown wafer-lot {edge.wafer_lot}"
        if edge.wafer_lot in self._placed:
            return f"wafer-lot {edge.wafer_lot} already scheduled"
        key = self.cell_key(edge)
        cell = self._cells.get(key)
        if cell is None:
            return f"no capacity cell {key}"
        if self.utilization[key] + lot.quantity > cell.capacity:
            return f"capacity cell {key} would exceed {cell.capacity}"
        if self.push_out_count + edge.kind.is_push_out > self.pull_in_count + edge.kind.is_pull_in:
            return "push-out without a matching pull-in"
        return None

    def apply(self, edge: ScheduleEdge) -> None:
        reason = self.check(edge)
        if reason:
            raise InfeasibleEdge(reason)
        lot = self._lots[edge.wafer_lot]
        self._placed[edge.wafer_lot] = edge
        self.edges.append(edge)
        self.utilization[self.cell_key(edge)] += lot.quantity
        if edge.order is not None:
            self.supported[edge.order] += lot.quantity
        self.pull_in_count += edge.kind.is_pull_in
        self.push_out_count += edge.kind.is_push_out

    @property
    def fitness(self) -> int:
        """Total undersupported request from the running totals."""
        return sum(max(o.demand - self.supported[o.id], 0) for o in self.instance.orders)


def _order(schedule: Schedule, order) -> Order:
    return order if isinstance(order, Order) else schedule.instance.order_by_id[order]


def supported_request(schedule: Schedule, order) -> int:
    oid = _order(schedule, order).id
    lots = schedule.instance.lot_by_id
    return sum(lots[e.wafer_lot].quantity for e in schedule.edges if e.order == oid)


def undersupported_request(schedule: Schedule, order) -> int:
    o = _order(schedule, order)
    return max(o.demand - supported_request(schedule, o), 0)


def oversupported_request(schedule: Schedule, order) -> int:
    o = _order(schedule, order)
    return max(supported_request(schedule, o) - o.demand, 0)


def capacity_utilization(schedule: Schedule, cell: CapacityCell) -> int:
    lots = schedule.instance.lot_by_id
    return sum(lots[e.wafer_lot].quantity for e in schedule.edges
               if schedule.cell_key(e) == cell.key)


def capacity_waste(schedule: Schedule, cell: CapacityCell) -> int:
    return cell.capacity - capacity_utilization(schedule, cell)


def mmppfo_fitness(schedule: Schedule) -> int:
    """Total undersupported request, recomputed from the edge list (minimize)."""
    return sum(undersupported_request(schedule, o) for o in schedule.instance.orders)


def remaining_demand(schedule: Schedule, order) -> int:
    o = _order(schedule, order)
    return o.demand - supported_request(schedule, o)


def dynamic_impact_mmppfo(schedule: Schedule, order, lot) -> float:
    """Wafers of remaining demand the lot covers without overshoot, floored at 0.1."""
    q = lot.quantity if isinstance(lot, WaferLot) else schedule.instance.lot_by_id[lot].quantity
    rd = remaining_demand(schedule, order)
    return max(rd - abs(rd - q), IMPACT_FLOOR)


def check_schedule(instance: MmppfoInstance, edges: Iterable[ScheduleEdge]) -> list[str]:
    """Every hard-constraint violation in a complete schedule.

    Works from the instance alone (no search space), so it can audit any
    solver's output.
    """
    problems: list[str] = []
    lots = instance.lot_by_id
    orders = instance.order_by_id
    cells = instance.cell_by_key
    seen: set[int] = set()
    util: dict = defaultdict(int)
    pulls = pushes = 0
    for e in edges:
        lot = lots.get(e.wafer_lot)
        if lot is None:
            problems.append(f"unknown wafer-lot {e.wafer_lot}")
            continue
        if e.wafer_lot in seen:
            problems.append(f"wafer-lot {e.wafer_lot} scheduled more than once")
            continue
        seen.add(e.wafer_lot)
        if Move(e.week, e.fab, e.kind) not in lot.allowed_moves:
            problems.append(f"wafer-lot {lot.id}: move to week {e.week} fab {e.fab} "
                            f"({e.kind.value}) not permitted")
        if e.order is not None:
            o = orders.get(e.order)
            if o is None:
                problems.append(f"unknown order {e.order}")
            else:
                if e.week > o.week:
                    problems.append(f"wafer-lot {lot.id} week {e.week} is after order "
                                    f"{o.id} commit week {o.week}")
                if o.product_group != lot.product_group:
                    problems.append(f"wafer-lot {lot.id} product group {lot.product_group} "
                                    f"cannot support order {o.id} ({o.product_group})")
        key = (lot.product_group, e.fab, e.week)
        if key not in cells:
            problems.append(f"no capacity cell {key} for wafer-lot {lot.id}")
        util[key] += lot.quantity
        pulls += e.kind.is_pull_in
        pushes += e.kind.is_push_out
    for key, used in util.items():
        cell = cells.get(key)
        if cell is not None and used > cell.capacity:
            problems.append(f"capacity cell {key}: utilization {used} exceeds {cell.capacity}")
    if pushes > pulls:
        problems.append(f"{pushes} push-outs but only {pulls} pull-ins")
    return problems

