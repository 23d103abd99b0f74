"""Search-space preparation and the engine adapter for wafer-lot scheduling."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import _kernels
from ..core import ContractViolation, ProblemAdapter, Sense, SolverConfig
from .model import (
    IMPACT_FLOOR,
    MmppfoInstance,
    MoveKind,
    Schedule,
    ScheduleEdge,
    check_schedule,
    mmppfo_fitness,
)

log = logging.getLogger(__name__)

__all__ = ["build_search_space", "SearchSpace", "MmppfoAdapter"]


def build_search_space(instance: MmppfoInstance) -> list[ScheduleEdge]:
    """Every single-lot placement that survives the static filters.

    Each lot gets its unassigned edge (original slot, no order) first,
    then one edge per (permitted move, order) pair where the product groups
    match, the lot lands no later than the order's commit week and the
    landing fab holds capacity for the product group that week.  Capacity
    totals and push-out pairing depend on the whole schedule and are left
    to construction.
    """
    cells = instance.cell_by_key
    orders = instance.processing_order()
    edges: list[ScheduleEdge] = []
    covered = set()
    for lot in instance.wafer_lots:
        edges.append(ScheduleEdge(lot.id, None, lot.week, lot.fab, MoveKind.STAY))
        for mv in lot.allowed_moves:
            if (lot.product_group, mv.fab, mv.week) not in cells:
                continue
            for o in orders:
                if o.product_group != lot.product_group or mv.week > o.week:
                    continue
                edges.append(ScheduleEdge(lot.id, o.id, mv.week, mv.fab, mv.kind))
                covered.add(o.id)
    for o in instance.orders:
        if o.id not in covered:
            log.warning("order %s has no wafer-lot that can support it", o.id)
    return edges


@dataclass(frozen=True)
class SearchSpace:
    """Search-space edges flattened into the arrays the kernels consume."""

    instance: MmppfoInstance
    edges: tuple[ScheduleEdge, ...]
    edge_lot: np.ndarray
    edge_cell: np.ndarray
    edge_pull: np.ndarray
    edge_push: np.ndarray
    lot_qty: np.ndarray
    lot_stay: np.ndarray
    order_ids: tuple[int, ...]
    order_demand: np.ndarray
    order_ptr: np.ndarray
    order_edges: np.ndarray
    cell_keys: tuple[tuple, ...]
    cell_cap: np.ndarray

    @classmethod
    def build(cls, instance: MmppfoInstance) -> "SearchSpace":
        edges = build_search_space(instance)
        lot_index = {l.id: i for i, l in enumerate(instance.wafer_lots)}
        cell_keys = tuple(c.key for c in instance.capacities)
        cell_index = {k: i for i, k in enumerate(cell_keys)}
        lots = instance.lot_by_id
        orders = instance.processing_order()
        order_pos = {o.id: i for i, o in enumerate(orders)}

        e_lot = np.empty(len(edges), np.int32)
        e_cell = np.empty(len(edges), np.int32)
        e_pull = np.zeros(len(edges), np.int32)
        e_push = np.zeros(len(edges), np.int32)
        lot_stay = np.full(len(lots), -1, np.int32)
        per_order: list[list[int]] = [[] for _ in orders]
        for k, e in enumerate(edges):
            lot = lots[e.wafer_lot]
            e_lot[k] = lot_index[e.wafer_lot]
            e_cell[k] = cell_index.get((lot.product_group, e.fab, e.week), -1)
            e_pull[k] = e.kind.is_pull_in
            e_push[k] = e.kind.is_push_out
            if e.order is None:
                lot_stay[e_lot[k]] = k
            else:
                per_order[order_pos[e.order]].append(k)
        ptr = np.zeros(len(orders) + 1, np.int32)
        ptr[1:] = np.cumsum([len(p) for p in per_order])
        flat = np.array([k for p in per_order for k in p], dtype=np.int32)
        return cls(
            instance=instance,
            edges=tuple(edges),
            edge_lot=e_lot,
            edge_cell=e_cell,
            edge_pull=e_pull,
            edge_push=e_push,
            lot_qty=np.array([l.quantity for l in instance.wafer_lots], np.float64),
            lot_stay=lot_stay,
            order_ids=tuple(o.id for o in orders),
            order_demand=np.array([o.demand for o in orders], np.float64),
            order_ptr=ptr,
            order_edges=flat,
            cell_keys=cell_keys,
            cell_cap=np.array([c.capacity for c in instance.capacities], np.float64),
        )

    def order_candidates(self, pos: int) -> np.ndarray:
        return self.order_edges[self.order_ptr[pos]:self.order_ptr[pos + 1]]

    def schedule(self, solution: Sequence[int]) -> Schedule:
        return Schedule(self.instance, [self.edges[k] for k in solution])


class _AntState:
    __slots__ = ("schedule", "order_pos", "chosen")

    def __init__(self, schedule: Schedule) -> None:
        self.schedule = schedule
        self.order_pos = 0
        self.chosen: list[int] = []


class MmppfoAdapter(ProblemAdapter):
    """Orders are served one at a time in commit-week order.

    The current order is offered every still-placeable edge that supports
    it until its demand is met or nothing fits; leftover lots then keep
    their original slot wherever capacity remains.
    """

    sense = Sense.MINIMIZE

    def __init__(self, space: SearchSpace, config: SolverConfig) -> None:
        self.space = space
        self.config = config
        self._lots = space.instance.lot_by_id
        self._eta = np.ones(len(space.edges))

    @classmethod
    def from_instance(cls, instance: MmppfoInstance, config: SolverConfig) -> "MmppfoAdapter":
        return cls(SearchSpace.build(instance), config)

    @property
    def edge_count(self) -> int:
        return len(self.space.edges)

    @property
    def max_steps(self) -> int:
        return len(self.space.lot_qty)

    def new_state(self) -> _AntState:
        return _AntState(Schedule(self.space.instance))

    def _remaining(self, state: _AntState) -> int:
        pos = state.order_pos
        return self.space.order_demand[pos] - state.schedule.supported[self.space.order_ids[pos]]

    def candidates(self, state: _AntState) -> list[int]:
        sp = self.space
        sched = state.schedule
        while state.order_pos < len(sp.order_ids):
            if self._remaining(state) > 0:
                cands = [int(k) for k in sp.order_candidates(state.order_pos)
                         if sched.check(sp.edges[k]) is None]
                if cands:
                    return cands
            state.order_pos += 1
        return []

    def dynamic_impact(self, state: _AntState, edge: int) -> float:
        rd = float(self._remaining(state))
        q = float(self._lots[self.space.edges[edge].wafer_lot].quantity)
        return max(rd - abs(rd - q), IMPACT_FLOOR)

    def apply(self, state: _AntState, edge: int) -> None:
        e = self.space.edges[edge]
        if e.order != self.space.order_ids[state.order_pos]:
            raise ContractViolation(f"edge {edge} does not serve the current order")
        state.schedule.apply(e)
        state.chosen.append(edge)

    def finalize(self, state: _AntState) -> list[int]:
        sp = self.space
        added = []
        for k in sp.lot_stay:
            if k < 0:
                continue
            e = sp.edges[k]
            if state.schedule.check(e) is None:
                state.schedule.apply(e)
                added.append(int(k))
        state.chosen.extend(added)
        return added

    def solution(self, state: _AntState) -> list[int]:
        return list(state.chosen)

    def fitness(self, state: _AntState) -> float:
        return float(state.schedule.fitness)

    def evaluate(self, solution: Sequence[int]) -> float:
        edges = [self.space.edges[k] for k in solution]
        problems = check_schedule(self.space.instance, edges)
        if problems:
            raise ValueError("; ".join(problems))
        return float(mmppfo_fitness(Schedule(self.space.instance, edges)))

    def batch_kernel(self, kernels=None):
        k = kernels or _kernels
        sp, cfg = self.space, self.config

        def construct(tau, uniforms):
            return k.mmppfo_construct(sp.edge_lot, sp.edge_cell, sp.edge_pull, sp.edge_push,
                                      sp.lot_qty, sp.lot_stay, sp.order_demand, sp.order_ptr,
                                      sp.order_edges, sp.cell_cap, tau, self._eta,
                                      cfg.alpha, cfg.beta, cfg.gamma, cfg.q0, uniforms)

        return construct
