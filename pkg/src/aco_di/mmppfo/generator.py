"""Seeded synthetic instances matching aggregate dataset parameters.

Only totals are prescribed (lot count, wafer total, periods, order count,
lot-size range, total capacity, total demand).  Lots and their allowed
moves are drawn first.  Orders and capacity then come from one of two
layouts.  The default builds them around a hidden feasible plan, so a
perfect schedule exists but is not where the lots already sit.  The
``even`` layout splits capacity uniformly and demand by stick-breaking;
its instances usually carry a large shortfall no schedule can remove.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CapacityCell, MmppfoInstance, Move, MoveKind, Order, WaferLot

__all__ = ["GeneratorParams", "GeneratorError", "SCHEMES", "generate_dataset"]

SCHEMES = ("plan", "even")


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorParams:
    wafer_lot_count: int = 300
    total_wafers: int = 6312
    periods: int = 7
    order_count: int = 24
    quantity_min: int = 1
    quantity_max: int = 25
    total_capacity: int = 6000
    total_demand: int = 5000
    fab_count: int = 2
    product_group_count: int = 2
    pull_in_rate: float = 0.5
    push_out_rate: float = 0.2
    offload_rate: float = 0.3
    max_pull_in_weeks: int = 2
    # "plan": demand and capacity follow a hidden feasible plan
    # "even": capacity split evenly, demand by random stick-breaking
    scheme: str = "plan"
    seed: int = 0

    @property
    def quantity_range(self) -> tuple[int, int]:
        return (self.quantity_min, self.quantity_max)

    def validate(self) -> None:
        if self.wafer_lot_count < 1:
            raise GeneratorError("need at least one wafer-lot")
        if self.quantity_min < 1 or self.quantity_max < self.quantity_min:
            raise GeneratorError(f"bad quantity range {self.quantity_range}")
        lo = self.wafer_lot_count * self.quantity_min
        hi = self.wafer_lot_count * self.quantity_max
        if not lo <= self.total_wafers <= hi:
            raise GeneratorError(
                f"total_wafers={self.total_wafers} unreachable with {self.wafer_lot_count} "
                f"lots of {self.quantity_min}-{self.quantity_max} wafers ({lo}..{hi})")
        if self.order_count < 1 or self.total_demand < self.order_count:
            raise GeneratorError("total_demand must give every order at least one wafer")
        if self.periods < 1 or self.fab_count < 1 or self.product_group_count < 1:
            raise GeneratorError("periods, fabs and product groups must be >= 1")
        if self.total_capacity < 0:
            raise GeneratorError("total_capacity must be >= 0")
        if self.scheme not in SCHEMES:
            raise GeneratorError(f"scheme must be one of {SCHEMES}")
        for name in ("pull_in_rate", "push_out_rate", "offload_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise GeneratorError(f"{name} must lie in [0, 1]")


def _lot_quantities(p: GeneratorParams, rng: np.random.Generator) -> list[int]:
    q = rng.integers(p.quantity_min, p.quantity_max + 1, size=p.wafer_lot_count)
    diff = p.total_wafers - int(q.sum())
    while diff != 0:
        step = 1 if diff > 0 else -1
        movable = np.flatnonzero(q < p.quantity_max) if step > 0 else np.flatnonzero(q > p.quantity_min)
        take = rng.choice(movable, size=min(abs(diff), len(movable)), replace=False)
        q[take] += step
        diff -= step * len(take)
    return q.tolist()


def _apportion(total: int, weights, minimum: int = 0) -> list[int]:
    """Integers summing to ``total``, proportional to ``weights`` (largest remainder)."""
    w = np.asarray(weights, dtype=np.float64)
    rest = total - minimum * len(w)
    if w.sum() <= 0:
        w = np.ones_like(w)
    raw = w / w.sum() * rest
    out = np.floor(raw).astype(np.int64)
    short = int(rest - out.sum())
    out[np.argsort(-(raw - out), kind="stable")[:short]] += 1
    return (out + minimum).tolist()


def generate_dataset(params: GeneratorParams) -> MmppfoInstance:
    params.validate()
    p = params
    rng = np.random.default_rng(p.seed)
    fabs = [f"F{10 * (k + 1)}" for k in range(p.fab_count)]
    groups = [f"P{k + 1}" for k in range(p.product_group_count)]

    lots = []
    for i, qty in enumerate(_lot_quantities(p, rng)):
        g = groups[int(rng.integers(len(groups)))]
        fab = fabs[int(rng.integers(len(fabs)))]
        week = int(rng.integers(p.periods))
        moves = [Move(week, fab, MoveKind.STAY)]
        others = [f for f in fabs if f != fab]
        for d in range(1, p.max_pull_in_weeks + 1):
            if week - d >= 0 and rng.random() < p.pull_in_rate:
                moves.append(Move(week - d, fab, MoveKind.PULL_IN))
                if others and rng.random() < p.offload_rate:
                    f2 = others[int(rng.integers(len(others)))]
                    moves.append(Move(week - d, f2, MoveKind.PULL_IN_OFFLOAD))
        if week + 1 < p.periods and rng.random() < p.push_out_rate:
            moves.append(Move(week + 1, fab, MoveKind.PUSH_OUT))
        for f2 in others:
            if rng.random() < p.offload_rate:
                moves.append(Move(week, f2, MoveKind.OFFLOAD))
        lots.append(WaferLot(i, int(qty), g, week, fab, tuple(moves)))

    if p.scheme == "even":
        capacities, orders = _even_layout(p, rng, lots, groups, fabs)
    else:
        capacities, orders = _planned_layout(p, rng, lots, groups, fabs)
    return MmppfoInstance(tuple(lots), orders, capacities)


def _order_slots(p, rng, lots, groups, week_p):
    wafers = {g: sum(l.quantity for l in lots if l.product_group == g) for g in groups}
    group_p = np.array([wafers[g] for g in groups], dtype=np.float64) + 1.0
    group_p /= group_p.sum()
    return [(groups[int(rng.choice(len(groups), p=group_p))], int(rng.choice(p.periods, p=week_p)))
            for _ in range(p.order_count)]


def _even_layout(p, rng, lots, groups, fabs):
    """Capacity spread evenly over cells, demand split by random stick-breaking."""
    cell_keys = [(g, f, w) for g in groups for f in fabs for w in range(p.periods)]
    share = _apportion(p.total_capacity, np.ones(len(cell_keys)))
    capacities = tuple(CapacityCell(*k, c) for k, c in zip(cell_keys, share))
    slots = _order_slots(p, rng, lots, groups, np.full(p.periods, 1.0 / p.periods))
    rest = p.total_demand - p.order_count
    cuts = np.sort(rng.integers(0, rest + 1, size=p.order_count - 1))
    bounds = [0, *map(int, cuts), rest]
    orders = tuple(Order(j, bounds[j + 1] - bounds[j] + 1, w, g) for j, (g, w) in enumerate(slots))
    return capacities, orders


def _planned_layout(p, rng, lots, groups, fabs):
    """Demand and capacity read off a random feasible plan.

    Lots are walked group by group (groups in random order) and each one is
    committed to a random order it can reach through one of its moves, until
    total demand is covered.  Order demand is what the plan delivers, and
    each cell gets the capacity the plan uses plus a share of the remaining
    capacity proportional to the uncommitted lots sitting there.  A perfect
    schedule therefore exists, but most of the spare capacity is where idle
    lots already are, so finding it means moving the right lots.
    """
    cell_keys = [(g, f, w) for g in groups for f in fabs for w in range(p.periods)]
    slots = _order_slots(p, rng, lots, groups, np.full(p.periods, 1.0 / p.periods))
    rank = {g: r for r, g in enumerate(rng.permutation(groups))}
    walk = sorted(rng.permutation(len(lots)).tolist(), key=lambda i: rank[lots[i].product_group])

    used = {k: 0 for k in cell_keys}
    demand = [0] * p.order_count
    committed = set()
    total = 0
    for i in walk:
        if total >= p.total_demand:
            break
        lot = lots[i]
        options = [(j, mv) for j, (g, w) in enumerate(slots)
                   if g == lot.product_group for mv in lot.allowed_moves if mv.week <= w]
        if not options:
            continue
        fresh = [o for o in options if demand[o[0]] == 0]
        pool = fresh or options
        j, mv = pool[int(rng.integers(len(pool)))]
        used[(lot.product_group, mv.fab, mv.week)] += lot.quantity
        demand[j] += lot.quantity
        committed.add(lot.id)
        total += lot.quantity

    # every order needs at least one wafer; settle the books against the largest orders
    for j in range(p.order_count):
        if demand[j] == 0:
            demand[j] = 1
            total += 1
    excess = total - p.total_demand
    for j in sorted(range(p.order_count), key=lambda j: -demand[j]):
        if excess <= 0:
            break
        cut = min(excess, demand[j] - 1)
        demand[j] -= cut
        excess -= cut
    if excess < 0:
        demand[int(np.argmax(demand))] -= excess
    orders = tuple(Order(j, demand[j], w, g) for j, (g, w) in enumerate(slots))

    plan = [used[k] for k in cell_keys]
    if sum(plan) > p.total_capacity:
        base = _apportion(p.total_capacity, plan)
    else:
        idle = {k: 0 for k in cell_keys}
        for lot in lots:
            if lot.id not in committed:
                idle[(lot.product_group, lot.fab, lot.week)] += lot.quantity
        spare = _apportion(p.total_capacity - sum(plan), [idle[k] for k in cell_keys])
        base = [a + b for a, b in zip(plan, spare)]
    capacities = tuple(CapacityCell(*k, c) for k, c in zip(cell_keys, base))
    return capacities, orders
