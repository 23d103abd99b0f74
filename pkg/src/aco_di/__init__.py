"""Max-min ant system whose selection rule weighs candidates by their dynamic impact.

Two problems ship with the engine: the multidimensional knapsack (``aco_di.mkp``)
and wafer-lot production floor scheduling (``aco_di.mmppfo``).
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .core import (
    CandidateView,
    ConfigError,
    ContractViolation,
    DegenerateWeightsError,
    EmptySearchSpaceError,
    PheromoneStore,
    ProblemAdapter,
    RunResult,
    Sense,
    SolverConfig,
    compute_probabilities,
    construct_solution,
    deposit,
    evaporate,
    init_pheromone,
    run,
    select_candidate,
)
from .impact import general_dynamic_impact, route_dynamic_impact

__all__ = [
    "BACKEND", "CandidateView", "ConfigError", "ContractViolation", "DegenerateWeightsError",
    "EmptySearchSpaceError", "PheromoneStore", "ProblemAdapter", "RunResult", "Sense",
    "SolverConfig", "compute_probabilities", "construct_solution", "deposit", "evaporate",
    "general_dynamic_impact", "init_pheromone", "route_dynamic_impact", "run",
    "select_candidate", "__version__",
]
