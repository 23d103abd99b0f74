"""Min-Max Ant System engine with a Dynamic Impact term in the edge weights.

The engine knows nothing about a concrete problem.  It talks to a
:class:`ProblemAdapter`, which enumerates feasible edges for a partial
solution, scores them with a state-dependent Dynamic Impact value and
applies the chosen edge.  Adapters may also ship a batch kernel (see
:mod:`aco_di._kernels`) that builds many ants at once; the engine uses it
when present and falls back to the step-by-step contract otherwise.  Both
paths consume the same uniform draws, so they produce identical solutions.
"""

from __future__ import annotations

import logging
import math
import os
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Optional, Sequence

import numpy as np

from .rng import UniformStream, iteration_uniforms

log = logging.getLogger(__name__)

__all__ = [
    "Sense",
    "SolverConfig",
    "PheromoneStore",
    "CandidateView",
    "ProblemAdapter",
    "RunResult",
    "ConfigError",
    "EmptySearchSpaceError",
    "DegenerateWeightsError",
    "ContractViolation",
    "init_pheromone",
    "edge_weights",
    "impact_power",
    "compute_probabilities",
    "select_index",
    "select_candidate",
    "evaporate",
    "deposit",
    "construct_solution",
    "run",
    "resolve_threads",
]


class Sense(IntEnum):
    MAXIMIZE = 1
    MINIMIZE = -1

    def better(self, a: float, b: Optional[float]) -> bool:
        """True if fitness ``a`` strictly beats ``b`` (``None`` loses to anything)."""
        if b is None:
            return True
        return a > b if self is Sense.MAXIMIZE else a < b

    def reached(self, fitness: float, target: float) -> bool:
        return fitness >= target if self is Sense.MAXIMIZE else fitness <= target


class ConfigError(ValueError):
    pass


class EmptySearchSpaceError(ValueError):
    pass


class DegenerateWeightsError(ArithmeticError):
    """All candidate weights are zero or non-finite."""


class ContractViolation(RuntimeError):
    """An adapter broke its own contract, e.g. rejected a candidate it offered."""


@dataclass(frozen=True)
class SolverConfig:
    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 0.0
    rho: float = 0.1
    q0: float = 0.0
    tau_max: float = 1.0
    tau_min: float = 0.001
    iterations: int = 3000
    parallel_ants: int = 16
    sequential_ants: int = 2
    seed: int = 0
    target_fitness: Optional[float] = None
    # Detection of target_fitness never ends a run unless this is set.
    stop_on_target: bool = False

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ConfigError(f"{name} must be finite and >= 0, got {v}")
        if not 0.0 < self.rho < 1.0:
            raise ConfigError(f"rho must lie in (0, 1), got {self.rho}")
        if not 0.0 <= self.q0 < 1.0:
            raise ConfigError(f"q0 must lie in [0, 1), got {self.q0}")
        if not (self.tau_max > 0 and math.isfinite(self.tau_max)):
            raise ConfigError(f"tau_max must be positive, got {self.tau_max}")
        if not 0.0 < self.tau_min < self.tau_max:
            raise ConfigError("tau_min must lie in (0, tau_max)")
        if self.iterations < 0:
            raise ConfigError("iterations must be >= 0")
        if self.parallel_ants < 1 or self.sequential_ants < 1:
            raise ConfigError("ant counts must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def replace(self, **changes) -> "SolverConfig":
        from dataclasses import replace

        return replace(self, **changes)


class PheromoneStore:
    """Per-edge trail values kept inside ``[tau_min, tau_max]``."""

    __slots__ = ("trail", "tau_min", "tau_max")

    def __init__(self, trail: np.ndarray, tau_min: float, tau_max: float) -> None:
        self.trail = trail
        self.tau_min = tau_min
        self.tau_max = tau_max

    def __len__(self) -> int:
        return len(self.trail)

    def __getitem__(self, edge: int) -> float:
        return float(self.trail[edge])

    def snapshot(self) -> np.ndarray:
        return self.trail.copy()

    def in_bounds(self) -> bool:
        return bool(np.all(self.trail >= self.tau_min) and np.all(self.trail <= self.tau_max))


@dataclass(frozen=True)
class CandidateView:
    edge_id: int
    dynamic_impact: float
    heuristic: float = 1.0


class ProblemAdapter(ABC):
    """What the engine needs from a problem.

    ``state`` objects are opaque to the engine and belong to a single ant.
    Candidate lists must come back in ascending edge-id order.
    """

    sense: Sense = Sense.MAXIMIZE

    @property
    @abstractmethod
    def edge_count(self) -> int: ...

    @property
    @abstractmethod
    def max_steps(self) -> int:
        """Upper bound on selection steps for one construction."""

    @abstractmethod
    def new_state(self): ...

    @abstractmethod
    def candidates(self, state) -> list[int]: ...

    @abstractmethod
    def dynamic_impact(self, state, edge: int) -> float: ...

    def heuristic(self, edge: int) -> float:
        return 1.0

    @abstractmethod
    def apply(self, state, edge: int) -> None: ...

    def is_complete(self, state) -> bool:
        return False

    def finalize(self, state) -> list[int]:
        """Edges appended after selection ends (e.g. default placements)."""
        return []

    @abstractmethod
    def solution(self, state) -> list[int]: ...

    @abstractmethod
    def fitness(self, state) -> float: ...

    @abstractmethod
    def evaluate(self, solution: Sequence[int]) -> float:
        """Fitness of a complete edge list, recomputed from scratch."""

    def batch_kernel(self) -> Optional[Callable]:
        """Optional fast path: ``f(tau, uniforms) -> (solutions, fitnesses, degenerate)``."""
        return None


@dataclass
class RunResult:
    best_fitness: Optional[float]
    best_solution: list[int]
    first_success_iteration: Optional[int]
    wall_time: float
    iteration_trace: list[float] = field(default_factory=list)
    best_iteration: Optional[int] = None

    @property
    def solved(self) -> bool:
        return self.first_success_iteration is not None


def init_pheromone(edge_count: int, config: SolverConfig) -> PheromoneStore:
    if edge_count < 1:
        raise EmptySearchSpaceError("search space has no edges")
    return PheromoneStore(np.full(edge_count, config.tau_max, dtype=np.float64),
                          config.tau_min, config.tau_max)


def impact_power(x: float, gamma: float) -> float:
    """``x**gamma``.  Integral exponents up to 64 use square-and-multiply,
    which the compiled kernel repeats bit for bit and which is far cheaper
    than ``pow``."""
    n = int(gamma)
    if n == gamma and 0 < n <= 64:
        result = 1.0
        while True:
            if n & 1:
                result *= x
            n >>= 1
            if not n:
                return result
            x *= x
    return x ** gamma


def edge_weights(
    base: Sequence[float], impacts: Sequence[float], gamma: float
) -> list[float]:
    """``base_i * (DI_i / max DI)**gamma``.

    ``base`` already holds ``tau**alpha * eta**beta``.  Dividing by the
    largest impact leaves the probabilities unchanged but keeps large
    exponents (gamma = 32) from overflowing.
    """
    if gamma == 0.0:
        return list(base)
    dmax = max(impacts)
    return [b * impact_power(d / dmax, gamma) for b, d in zip(base, impacts)]


def _base_weights(candidates: Sequence[CandidateView], trail, config: SolverConfig) -> list[float]:
    a, b = config.alpha, config.beta
    return [float(trail[c.edge_id]) ** a * c.heuristic ** b for c in candidates]


def _check_impacts(candidates: Sequence[CandidateView]) -> None:
    for c in candidates:
        if not c.dynamic_impact > 0:
            raise ValueError(f"dynamic impact must be > 0 (edge {c.edge_id}: {c.dynamic_impact})")


def compute_probabilities(
    candidates: Sequence[CandidateView], pheromone: PheromoneStore, config: SolverConfig
) -> list[float]:
    if not candidates:
        raise ValueError("no candidates")
    _check_impacts(candidates)
    w = edge_weights(_base_weights(candidates, pheromone.trail, config),
                     [c.dynamic_impact for c in candidates], config.gamma)
    total = math.fsum(w)
    if not (total > 0 and math.isfinite(total)):
        raise DegenerateWeightsError("all candidate weights are zero or non-finite")
    return [x / total for x in w]


def select_index(weights: Sequence[float], u_exploit: float, u_pick: float, q0: float):
    """Pseudo-random proportional rule over raw weights.

    Returns ``(index, degenerate)``.  With probability ``q0`` the heaviest
    weight wins (first on ties); otherwise inverse-CDF sampling on
    ``u_pick``.  Zero or non-finite totals fall back to a uniform pick.
    """
    k = len(weights)
    if u_exploit < q0:
        best = 0
        for i in range(1, k):
            if weights[i] > weights[best]:
                best = i
        return best, False
    total = 0.0
    for w in weights:
        total += w
    if not (total > 0.0 and total < math.inf):
        return min(int(u_pick * k), k - 1), True
    target = u_pick * total
    acc = 0.0
    last = 0
    for i in range(k):
        w = weights[i]
        if w > 0.0:
            last = i
        acc += w
        if target < acc:
            return i, False
    return last, False


def select_candidate(
    candidates: Sequence[CandidateView],
    pheromone: PheromoneStore,
    config: SolverConfig,
    rng_stream: UniformStream,
) -> int:
    if not candidates:
        raise ValueError("no candidates")
    _check_impacts(candidates)
    u_exploit = rng_stream.next()
    u_pick = rng_stream.next()
    w = edge_weights(_base_weights(candidates, pheromone.trail, config),
                     [c.dynamic_impact for c in candidates], config.gamma)
    idx, degenerate = select_index(w, u_exploit, u_pick, config.q0)
    if degenerate:
        log.warning("degenerate candidate weights; falling back to uniform selection")
    return candidates[idx].edge_id


def evaporate(pheromone: PheromoneStore, config: SolverConfig) -> PheromoneStore:
    t = pheromone.trail
    np.multiply(t, 1.0 - config.rho, out=t)
    np.maximum(t, pheromone.tau_min, out=t)
    return pheromone


def deposit(pheromone: PheromoneStore, solution: Sequence[int], config: SolverConfig) -> PheromoneStore:
    if len(solution) == 0:
        return pheromone
    idx = np.asarray(solution, dtype=np.int64)
    n = len(pheromone.trail)
    if idx.min() < 0 or idx.max() >= n:
        raise IndexError(f"edge id out of range [0, {n})")
    t = pheromone.trail
    # Each visited edge is reinforced once even if listed twice.
    idx = np.unique(idx)
    t[idx] = np.minimum(t[idx] + config.rho, pheromone.tau_max)
    return pheromone


def construct_solution(
    adapter: ProblemAdapter,
    pheromone: PheromoneStore,
    config: SolverConfig,
    rng_stream: UniformStream,
) -> tuple[list[int], float]:
    """Build one solution through the step-by-step adapter contract."""
    state = adapter.new_state()
    trail = pheromone.trail
    a, b, g = config.alpha, config.beta, config.gamma
    while not adapter.is_complete(state):
        cands = adapter.candidates(state)
        if not cands:
            break
        base = [float(trail[e]) ** a * adapter.heuristic(e) ** b for e in cands]
        impacts = [adapter.dynamic_impact(state, e) for e in cands]
        for e, d in zip(cands, impacts):
            if not d > 0:
                raise ContractViolation(f"adapter returned non-positive dynamic impact for edge {e}")
        u_exploit = rng_stream.next()
        u_pick = rng_stream.next()
        idx, degenerate = select_index(edge_weights(base, impacts, g), u_exploit, u_pick, config.q0)
        if degenerate:
            log.warning("degenerate candidate weights; falling back to uniform selection")
        try:
            adapter.apply(state, cands[idx])
        except ContractViolation:
            raise
        except Exception as exc:
            raise ContractViolation(f"adapter rejected feasible edge {cands[idx]}: {exc}") from exc
    adapter.finalize(state)
    return adapter.solution(state), adapter.fitness(state)


def resolve_threads(default: int = 1) -> int:
    """Worker pool size; ``ACO_THREADS`` overrides.  Never affects results."""
    env = os.environ.get("ACO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer ACO_THREADS=%r", env)
    return max(1, default)


def _pick_best(fitnesses: Sequence[float], sense: Sense) -> int:
    best = 0
    for i in range(1, len(fitnesses)):
        if sense.better(fitnesses[i], fitnesses[best]):
            best = i
    return best


def run(
    adapter_factory: Callable[[], ProblemAdapter],
    config: SolverConfig,
    *,
    threads: Optional[int] = None,
    use_kernel: bool = True,
) -> RunResult:
    """Run the colony for ``config.iterations`` iterations.

    Each of ``parallel_ants`` workers builds ``sequential_ants`` solutions
    against a frozen trail snapshot and submits its best.  The iteration
    best evaporates-then-deposits; the global best is reported.
    """
    adapter = adapter_factory()
    sense = adapter.sense
    pheromone = init_pheromone(adapter.edge_count, config)
    P, S = config.parallel_ants, config.sequential_ants
    width = 2 * adapter.max_steps
    nthreads = min(threads if threads is not None else resolve_threads(), P)

    kernel = adapter.batch_kernel() if use_kernel else None
    if kernel is None:
        adapters = [adapter] + [adapter_factory() for _ in range(min(nthreads, P) - 1)]
    chunks = np.array_split(np.arange(P), nthreads)
    chunks = [c for c in chunks if len(c)]

    def build_chunk(ci: int, tau: np.ndarray, block: np.ndarray):
        workers = chunks[ci]
        if kernel is not None:
            sols, fits, degenerate = kernel(tau, block[workers].reshape(len(workers) * S, -1))
            if degenerate:
                log.warning("%d degenerate selection steps fell back to uniform", degenerate)
        else:
            ad = adapters[ci]
            store = PheromoneStore(tau, config.tau_min, config.tau_max)
            sols, fits = [], []
            for w in workers:
                for s in range(S):
                    sol, fit = construct_solution(ad, store, config, UniformStream(block[w, s]))
                    sols.append(sol)
                    fits.append(fit)
        out = []
        for j in range(len(workers)):
            k = j * S + _pick_best(fits[j * S:(j + 1) * S], sense)
            out.append((sols[k], fits[k]))
        return out

    best_fit: Optional[float] = None
    best_sol: list[int] = []
    best_it: Optional[int] = None
    first_success: Optional[int] = None
    trace: list[float] = []
    pool = ThreadPoolExecutor(max_workers=len(chunks)) if len(chunks) > 1 else None
    t0 = time.perf_counter()  # setup is excluded from wall time
    try:
        for it in range(config.iterations):
            block = iteration_uniforms(config.seed, it, P, S, width)
            tau = pheromone.snapshot()
            if pool is None:
                per_worker = build_chunk(0, tau, block)
            else:
                per_worker = []
                for part in pool.map(lambda ci: build_chunk(ci, tau, block), range(len(chunks))):
                    per_worker.extend(part)
            k = _pick_best([f for _, f in per_worker], sense)
            it_sol, it_fit = per_worker[k]
            evaporate(pheromone, config)
            deposit(pheromone, it_sol, config)
            trace.append(it_fit)
            if sense.better(it_fit, best_fit):
                best_fit, best_sol, best_it = it_fit, list(it_sol), it
            if (first_success is None and config.target_fitness is not None
                    and sense.reached(it_fit, config.target_fitness)):
                first_success = it
                if config.stop_on_target:
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    return RunResult(
        best_fitness=best_fit,
        best_solution=best_sol,
        first_success_iteration=first_success,
        wall_time=time.perf_counter() - t0,
        iteration_trace=trace,
        best_iteration=best_it,
    )
