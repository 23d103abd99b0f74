"""Invariant checks shared by the unit suite and the acceptance gate.

Each ``prop_*`` takes hypothesis-drawn arguments and asserts one invariant;
callers wrap them with ``given`` and their own example budget.
"""

import math

import numpy as np
from hypothesis import strategies as st

from aco_di.core import (
    CandidateView,
    PheromoneStore,
    SolverConfig,
    compute_probabilities,
    construct_solution,
    deposit,
    evaporate,
)
from aco_di.mmppfo import (
    GeneratorParams,
    MmppfoAdapter,
    Schedule,
    capacity_utilization,
    capacity_waste,
    check_schedule,
    dynamic_impact_mmppfo,
    generate_dataset,
    mmppfo_fitness,
    oversupported_request,
    undersupported_request,
)
from aco_di.mmppfo.model import IMPACT_FLOOR
from aco_di.rng import UniformStream

positive = st.floats(1e-6, 1e6, allow_nan=False, allow_infinity=False)
exponent = st.floats(0.0, 32.0, allow_nan=False)


@st.composite
def candidate_sets(draw):
    n = draw(st.integers(1, 12))
    tau_min = draw(st.floats(1e-4, 0.1))
    tau_max = draw(st.floats(tau_min * 1.5, 10.0))
    trail = draw(st.lists(st.floats(tau_min, tau_max), min_size=n, max_size=n))
    impacts = draw(st.lists(positive, min_size=n, max_size=n))
    heur = draw(st.lists(positive, min_size=n, max_size=n))
    cfg = SolverConfig(alpha=draw(st.floats(0, 4)), beta=draw(st.floats(0, 4)), gamma=draw(exponent),
                       tau_min=tau_min, tau_max=tau_max)
    cands = [CandidateView(i, d, h) for i, (d, h) in enumerate(zip(impacts, heur))]
    return cands, PheromoneStore(np.array(trail), tau_min, tau_max), cfg


def prop_probabilities_normalized(case):
    cands, store, cfg = case
    p = compute_probabilities(cands, store, cfg)
    assert all(x >= 0 for x in p)
    assert abs(math.fsum(p) - 1.0) <= 1e-9


@st.composite
def pheromone_histories(draw):
    n = draw(st.integers(1, 20))
    tau_min = draw(st.floats(1e-4, 0.1))
    tau_max = draw(st.floats(tau_min * 1.5, 10.0))
    rho = draw(st.floats(0.001, 0.999))
    cfg = SolverConfig(rho=rho, tau_min=tau_min, tau_max=tau_max)
    deposits = draw(st.lists(st.lists(st.integers(0, n - 1), max_size=n, unique=True), max_size=30))
    return n, cfg, deposits


def prop_pheromone_bounds(history):
    n, cfg, deposits = history
    store = PheromoneStore(np.full(n, cfg.tau_max), cfg.tau_min, cfg.tau_max)
    for edges in deposits:
        evaporate(store, cfg)
        deposit(store, edges, cfg)
        assert store.in_bounds()
        assert np.all(store.trail >= cfg.tau_min) and np.all(store.trail <= cfg.tau_max)


@st.composite
def generator_params(draw):
    lots = draw(st.integers(1, 25))
    qmin = draw(st.integers(1, 5))
    qmax = draw(st.integers(qmin, qmin + 10))
    wafers = draw(st.integers(lots * qmin, lots * qmax))
    orders = draw(st.integers(1, 6))
    demand = draw(st.integers(orders, max(orders, wafers)))
    return GeneratorParams(
        wafer_lot_count=lots, total_wafers=wafers, periods=draw(st.integers(1, 5)),
        order_count=orders, quantity_min=qmin, quantity_max=qmax,
        total_capacity=draw(st.integers(0, 2 * wafers)), total_demand=demand,
        fab_count=draw(st.integers(1, 3)), product_group_count=draw(st.integers(1, 2)),
        pull_in_rate=draw(st.floats(0, 1)), push_out_rate=draw(st.floats(0, 1)),
        offload_rate=draw(st.floats(0, 1)), max_pull_in_weeks=draw(st.integers(0, 2)),
        scheme=draw(st.sampled_from(["plan", "even"])), seed=draw(st.integers(0, 2**32)),
    )


def prop_generator_conservation(params):
    inst = generate_dataset(params)
    assert len(inst.wafer_lots) == params.wafer_lot_count
    assert inst.total_wafers == params.total_wafers
    assert inst.total_demand == params.total_demand
    assert inst.total_capacity == params.total_capacity
    assert all(params.quantity_min <= l.quantity <= params.quantity_max for l in inst.wafer_lots)
    assert all(o.demand >= 1 for o in inst.orders)


@st.composite
def built_schedules(draw):
    """A generated floor plus one ant's schedule on it."""
    params = draw(generator_params())
    gamma = draw(st.sampled_from([0.0, 1.0, 4.0]))
    cfg = SolverConfig(gamma=gamma, q0=draw(st.floats(0, 0.99)))
    inst = generate_dataset(params)
    ad = MmppfoAdapter.from_instance(inst, cfg)
    trail = np.array(draw(st.lists(st.floats(cfg.tau_min, cfg.tau_max),
                                   min_size=ad.edge_count, max_size=ad.edge_count)))
    seed = draw(st.integers(0, 2**32))
    u = np.random.default_rng(seed).random(2 * ad.max_steps)
    sol, fit = construct_solution(ad, PheromoneStore(trail, cfg.tau_min, cfg.tau_max), cfg,
                                  UniformStream(u))
    return inst, [ad.space.edges[k] for k in sol], fit


def prop_schedule_invariants(case):
    inst, edges, fit = case
    assert check_schedule(inst, edges) == []
    sched = Schedule(inst, edges)
    assert mmppfo_fitness(sched) == sched.fitness == fit
    assert sched.push_out_count <= sched.pull_in_count
    for o in inst.orders:
        assert undersupported_request(sched, o) * oversupported_request(sched, o) == 0
    total = sum(capacity_utilization(sched, c) + capacity_waste(sched, c) for c in inst.capacities)
    assert total == inst.total_capacity
    assert all(capacity_waste(sched, c) >= 0 for c in inst.capacities)


def prop_mmppfo_impact_floor(case):
    inst, edges, _ = case
    sched = Schedule(inst, edges)
    for o in inst.orders:
        for lot in inst.wafer_lots:
            assert dynamic_impact_mmppfo(sched, o, lot) >= IMPACT_FLOOR
