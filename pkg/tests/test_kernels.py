import os
import subprocess
import sys

import numpy as np
import pytest

from aco_di import _kernels, _pykernels
from aco_di.core import PheromoneStore, SolverConfig, construct_solution, run
from aco_di.mkp import MkpAdapter, random_mkp
from aco_di.mmppfo import GeneratorParams, MmppfoAdapter, generate_dataset
from aco_di.rng import UniformStream, iteration_uniforms

GAMMAS = [0, 0.125, 1, 2.5, 4, 8, 32]

try:
    from aco_di import _ckernels
except ImportError:  # built without a compiler
    _ckernels = None


@pytest.fixture(scope="module")
def small_floor_space():
    inst = generate_dataset(GeneratorParams(wafer_lot_count=40, total_wafers=600, total_capacity=560,
                                            total_demand=480, order_count=6, seed=3))
    return inst


def adapters(gamma, floor):
    cfg = SolverConfig(gamma=gamma, q0=0.06)
    return [MkpAdapter(random_mkp(20, 3, seed=1), cfg), MmppfoAdapter.from_instance(floor, cfg)]


def three_ways(ad, ants=4):
    tau = np.random.default_rng(1).uniform(0.01, 1.0, ad.edge_count)
    u = iteration_uniforms(5, 0, ants, 1, 2 * ad.max_steps).reshape(ants, -1)
    generic = [construct_solution(ad, PheromoneStore(tau.copy(), 0.001, 1.0), ad.config,
                                  UniformStream(u[i])) for i in range(ants)]
    py = ad.batch_kernel(_pykernels)(tau, u)
    return tau, u, generic, py


@pytest.mark.parametrize("gamma", GAMMAS)
def test_python_kernel_matches_generic_path(gamma, small_floor_space):
    for ad in adapters(gamma, small_floor_space):
        _, _, generic, (sols, fits, _) = three_ways(ad)
        assert sols == [g[0] for g in generic]
        assert fits == [g[1] for g in generic]


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
@pytest.mark.parametrize("gamma", GAMMAS)
def test_compiled_kernel_matches_python_kernel(gamma, small_floor_space):
    for ad in adapters(gamma, small_floor_space):
        tau, u, _, py = three_ways(ad)
        c = ad.batch_kernel(_ckernels)(tau, u)
        assert c[0] == py[0] and c[1] == py[1] and c[2] == py[2]


def test_run_identical_with_and_without_kernel(small_floor_space):
    cfg = SolverConfig(gamma=4, iterations=15, parallel_ants=3)
    for make in (lambda: MkpAdapter(random_mkp(15, 2, seed=4), cfg),
                 lambda: MmppfoAdapter.from_instance(small_floor_space, cfg)):
        a = run(make, cfg, use_kernel=True)
        b = run(make, cfg, use_kernel=False)
        assert (a.best_solution, a.iteration_trace) == (b.best_solution, b.iteration_trace)


def test_threads_do_not_change_results():
    inst = random_mkp(18, 3, seed=2)
    cfg = SolverConfig(gamma=8, iterations=10, parallel_ants=5, sequential_ants=2)
    ref = run(lambda: MkpAdapter(inst, cfg), cfg, threads=1)
    for t in (2, 3, 8):
        r = run(lambda: MkpAdapter(inst, cfg), cfg, threads=t)
        assert (r.best_solution, r.iteration_trace) == (ref.best_solution, ref.iteration_trace)


def test_backend_name():
    assert _kernels.BACKEND in ("cython", "python")
    assert _pykernels.BACKEND == "python"


def test_pure_python_switch():
    env = dict(os.environ, ACO_DI_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import aco_di; print(aco_di.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
