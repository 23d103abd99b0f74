import math

import numpy as np
import pytest

from aco_di.core import (
    CandidateView,
    ConfigError,
    ContractViolation,
    EmptySearchSpaceError,
    PheromoneStore,
    ProblemAdapter,
    Sense,
    SolverConfig,
    compute_probabilities,
    construct_solution,
    deposit,
    edge_weights,
    evaporate,
    impact_power,
    init_pheromone,
    resolve_threads,
    run,
    select_candidate,
    select_index,
)
from aco_di.mkp import MkpAdapter
from aco_di.rng import UniformStream, iteration_uniforms


def store(values, tau_min=0.001, tau_max=1.0):
    return PheromoneStore(np.array(values, dtype=float), tau_min, tau_max)


def cands(impacts, heuristics=None):
    heuristics = heuristics or [1.0] * len(impacts)
    return [CandidateView(i, d, h) for i, (d, h) in enumerate(zip(impacts, heuristics))]


class TestConfig:
    def test_defaults_are_valid(self):
        cfg = SolverConfig()
        assert cfg.tau_min < cfg.tau_max and 0 < cfg.rho < 1

    @pytest.mark.parametrize("kw", [
        {"rho": 0.0}, {"rho": 1.0}, {"q0": 1.0}, {"q0": -0.1}, {"tau_min": 1.0},
        {"tau_min": 0.0}, {"alpha": -1.0}, {"gamma": math.inf}, {"beta": math.nan},
        {"parallel_ants": 0}, {"sequential_ants": 0}, {"seed": -1}, {"seed": 2**64},
        {"iterations": -1},
    ])
    def test_rejects(self, kw):
        with pytest.raises(ConfigError):
            SolverConfig(**kw)

    def test_replace_revalidates(self):
        with pytest.raises(ConfigError):
            SolverConfig().replace(rho=2.0)


class TestInitPheromone:
    def test_three_edges_at_ceiling(self):
        assert init_pheromone(3, SolverConfig(tau_max=1.0)).trail.tolist() == [1.0, 1.0, 1.0]

    def test_single_edge(self):
        assert init_pheromone(1, SolverConfig(tau_max=0.5, tau_min=0.001)).trail.tolist() == [0.5]

    def test_inside_bounds(self):
        p = init_pheromone(2, SolverConfig(tau_max=2.0, tau_min=0.1))
        assert p.trail.tolist() == [2.0, 2.0] and p.in_bounds()

    def test_empty_space(self):
        with pytest.raises(EmptySearchSpaceError):
            init_pheromone(0, SolverConfig())


class TestProbabilities:
    def test_symmetry(self):
        p = compute_probabilities(cands([1.0, 1.0]), store([1, 1]), SolverConfig(gamma=2))
        assert p == [0.5, 0.5]

    def test_hand_evaluated(self):
        p = compute_probabilities(cands([2.0, 1.0]), store([1, 1]), SolverConfig(gamma=1))
        assert p == pytest.approx([2 / 3, 1 / 3], abs=1e-15)

    def test_gamma_zero_ignores_impact(self):
        p = compute_probabilities(cands([2.0, 1.0]), store([1, 1]), SolverConfig(gamma=0))
        assert p == [0.5, 0.5]

    def test_pheromone_and_heuristic(self):
        cfg = SolverConfig(alpha=2, beta=1, gamma=0)
        p = compute_probabilities(cands([1, 1], [1.0, 3.0]), store([0.5, 1.0]), cfg)
        # 0.25*1 vs 1*3
        assert p == pytest.approx([0.25 / 3.25, 3 / 3.25])

    def test_large_gamma_does_not_overflow(self):
        p = compute_probabilities(cands([1e6, 5e5]), store([1, 1]), SolverConfig(gamma=32))
        assert sum(p) == pytest.approx(1.0) and p[0] > 0.999

    def test_nonpositive_impact_rejected(self):
        with pytest.raises(ValueError):
            compute_probabilities(cands([0.0, 1.0]), store([1, 1]), SolverConfig(gamma=1))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            compute_probabilities([], store([1]), SolverConfig())


def test_impact_power_matches_pow():
    for x in (0.3, 0.999, 1.0, 0.5):
        for g in (1, 2, 4, 8, 32, 0.5, 2.5, 100):
            assert impact_power(x, g) == pytest.approx(x ** g, rel=1e-13)


def test_edge_weights_normalizes_by_max():
    assert edge_weights([1.0, 2.0], [4.0, 2.0], 1.0) == [1.0, 1.0]


class TestSelect:
    def test_exploit_picks_argmax(self):
        assert select_index([3.0, 1.0], 0.0, 0.9, 0.999999) == (0, False)

    def test_roulette(self):
        assert select_index([1.0, 1.0], 0.5, 0.7, 0.0) == (1, False)
        assert select_index([1.0, 1.0], 0.5, 0.3, 0.0) == (0, False)

    def test_exploit_branch_when_draw_below_q0(self):
        assert select_index([1.0, 5.0], 0.3, 0.0, 0.5) == (1, False)

    def test_ties_go_to_first(self):
        assert select_index([2.0, 2.0, 1.0], 0.0, 0.0, 0.5)[0] == 0

    def test_degenerate_falls_back_to_uniform(self):
        assert select_index([0.0, 0.0, 0.0], 0.9, 0.5, 0.0) == (1, True)
        assert select_index([math.nan, 1.0], 0.9, 0.99, 0.0) == (1, True)

    def test_roulette_skips_zero_weight_tail(self):
        # a draw landing past the last positive weight still returns a positive one
        assert select_index([1.0, 0.0], 0.9, 0.9999999999999999, 0.0)[0] == 0

    def test_select_candidate_consumes_two_draws(self):
        s = UniformStream([0.9, 0.7, 0.1, 0.1])
        cfg = SolverConfig(q0=0.0)
        assert select_candidate(cands([1, 1]), store([1, 1]), cfg, s) == 1
        assert s.position == 2

    def test_exploitation_share(self):
        cfg = SolverConfig(q0=0.96)
        u = iteration_uniforms(7, 0, 1, 1, 20000)[0, 0]
        s = UniformStream(u)
        picks = [select_candidate(cands([1, 1, 1]), store([1.0, 0.5, 0.5]), cfg, s)
                 for _ in range(10000)]
        assert picks.count(0) / 10000 >= 0.96


class TestUpdate:
    def test_evaporate(self):
        assert evaporate(store([1.0]), SolverConfig(rho=0.1)).trail[0] == pytest.approx(0.9)

    def test_evaporate_clamps(self):
        assert evaporate(store([0.001]), SolverConfig(rho=0.1)).trail[0] == 0.001

    def test_deposit(self):
        assert deposit(store([0.9]), [0], SolverConfig(rho=0.1)).trail[0] == pytest.approx(1.0)

    def test_deposit_clamps(self):
        assert deposit(store([1.0]), [0], SolverConfig(rho=0.1)).trail[0] == 1.0

    def test_deposit_touches_only_visited(self):
        p = deposit(store([0.5, 0.5, 0.5]), [2], SolverConfig(rho=0.1))
        assert p.trail.tolist() == [0.5, 0.5, 0.6]

    def test_empty_deposit(self):
        assert deposit(store([0.4, 0.2]), [], SolverConfig()).trail.tolist() == [0.4, 0.2]

    def test_deposit_bad_edge(self):
        with pytest.raises(IndexError):
            deposit(store([0.4]), [3], SolverConfig())


class _Empty(ProblemAdapter):
    sense = Sense.MAXIMIZE
    edge_count = 1
    max_steps = 1

    def new_state(self):
        return []

    def candidates(self, state):
        return []

    def dynamic_impact(self, state, edge):
        return 1.0

    def apply(self, state, edge):
        state.append(edge)

    def solution(self, state):
        return list(state)

    def fitness(self, state):
        return 0.0

    def evaluate(self, solution):
        return 0.0


class _Liar(_Empty):
    """Offers an edge and then refuses it."""

    def candidates(self, state):
        return [0]

    def apply(self, state, edge):
        raise ValueError("no")


class _BadImpact(_Empty):
    def candidates(self, state):
        return [0]

    def dynamic_impact(self, state, edge):
        return 0.0


class TestConstruct:
    def test_empty_space(self):
        assert construct_solution(_Empty(), store([1.0]), SolverConfig(), UniformStream([])) == ([], 0.0)

    def test_rejected_edge_is_contract_violation(self):
        with pytest.raises(ContractViolation):
            construct_solution(_Liar(), store([1.0]), SolverConfig(), UniformStream([0.5, 0.5]))

    def test_zero_impact_is_contract_violation(self):
        with pytest.raises(ContractViolation):
            construct_solution(_BadImpact(), store([1.0]), SolverConfig(), UniformStream([0.5, 0.5]))

    def test_toy_greedy_is_feasible(self, toy_mkp):
        cfg = SolverConfig(gamma=4, q0=0.999999)
        sol, fit = construct_solution(MkpAdapter(toy_mkp, cfg), store([1, 1, 1]), cfg,
                                      UniformStream([0.0] * 6))
        assert toy_mkp.weights[0, sol].sum() <= 4
        assert fit == toy_mkp.profits[sol].sum()

    def test_replay(self, toy_mkp):
        cfg = SolverConfig(gamma=1)
        u = iteration_uniforms(3, 0, 1, 1, 6)[0, 0]
        a = construct_solution(MkpAdapter(toy_mkp, cfg), store([1, 1, 1]), cfg, UniformStream(u))
        b = construct_solution(MkpAdapter(toy_mkp, cfg), store([1, 1, 1]), cfg, UniformStream(u))
        assert a == b


class TestRun:
    def test_zero_iterations(self, toy_mkp):
        cfg = SolverConfig(iterations=0)
        r = run(lambda: MkpAdapter(toy_mkp, cfg), cfg)
        assert r.best_fitness is None and r.best_solution == [] and r.iteration_trace == []

    @pytest.mark.parametrize("seed", [0, 1, 2, 12345])
    def test_toy_reaches_optimum(self, toy_mkp, seed):
        cfg = SolverConfig(gamma=8, q0=0.01, iterations=50, parallel_ants=4, seed=seed)
        r = run(lambda: MkpAdapter(toy_mkp, cfg), cfg)
        assert r.best_fitness == 11.0
        assert sorted(r.best_solution) == [0, 1]
        assert len(r.iteration_trace) == 50
        assert max(r.iteration_trace) == r.best_fitness

    def test_deterministic(self, toy_mkp):
        cfg = SolverConfig(gamma=2, iterations=20, parallel_ants=3, seed=9)
        a = run(lambda: MkpAdapter(toy_mkp, cfg), cfg)
        b = run(lambda: MkpAdapter(toy_mkp, cfg), cfg)
        assert (a.best_solution, a.iteration_trace) == (b.best_solution, b.iteration_trace)

    def test_target_detection_without_early_exit(self, toy_mkp):
        cfg = SolverConfig(gamma=8, iterations=30, parallel_ants=4, target_fitness=11.0)
        r = run(lambda: MkpAdapter(toy_mkp, cfg), cfg)
        assert r.first_success_iteration is not None and len(r.iteration_trace) == 30

    def test_stop_on_target(self, toy_mkp):
        cfg = SolverConfig(gamma=8, iterations=30, parallel_ants=4, target_fitness=11.0,
                           stop_on_target=True)
        r = run(lambda: MkpAdapter(toy_mkp, cfg), cfg)
        assert len(r.iteration_trace) == r.first_success_iteration + 1

    def test_best_matches_reevaluation(self, toy_mkp):
        cfg = SolverConfig(gamma=1, iterations=10, parallel_ants=2)
        ad = MkpAdapter(toy_mkp, cfg)
        r = run(lambda: MkpAdapter(toy_mkp, cfg), cfg)
        assert ad.evaluate(r.best_solution) == r.best_fitness

    def test_contract_violation_aborts_run(self):
        cfg = SolverConfig(iterations=3, parallel_ants=1)
        with pytest.raises(ContractViolation):
            run(_Liar, cfg)


def test_resolve_threads(monkeypatch):
    monkeypatch.setenv("ACO_THREADS", "3")
    assert resolve_threads() == 3
    monkeypatch.setenv("ACO_THREADS", "zero")
    assert resolve_threads(2) == 2
    monkeypatch.delenv("ACO_THREADS")
    assert resolve_threads() == 1


def test_sense():
    assert Sense.MAXIMIZE.better(2, 1) and not Sense.MAXIMIZE.better(1, 1)
    assert Sense.MINIMIZE.better(1, 2) and Sense.MINIMIZE.better(5, None)
    assert Sense.MAXIMIZE.reached(11, 11) and Sense.MINIMIZE.reached(0, 0)
