"""Time the compiled construction kernels against their pure-Python twins.

    python benchmarks/bench_kernels.py --ants 32 --repeat 3

Both kernels see the same trail and uniforms, so the script also checks
that they build the same solutions.
"""

import argparse
import time

import numpy as np

from aco_di import _pykernels
from aco_di.core import SolverConfig
from aco_di.mkp import MkpAdapter, random_mkp
from aco_di.mmppfo import GeneratorParams, MmppfoAdapter, generate_dataset
from aco_di.rng import iteration_uniforms

try:
    from aco_di import _ckernels
except ImportError:
    _ckernels = None


def cases(mkp_n: int, mkp_m: int):
    cfg = SolverConfig(gamma=8, q0=0.01)
    yield f"mkp {mkp_n}x{mkp_m}", MkpAdapter(random_mkp(mkp_n, mkp_m, seed=0), cfg)
    cfg = SolverConfig(gamma=4, q0=0.06)
    yield "mmppfo 300 lots", MmppfoAdapter.from_instance(generate_dataset(GeneratorParams()), cfg)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ants", type=int, default=32)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--mkp-n", type=int, default=100)
    ap.add_argument("--mkp-m", type=int, default=5)
    args = ap.parse_args()

    print(f"{'case':<18}{'python ms/ant':>15}{'cython ms/ant':>15}{'speedup':>9}  same")
    for name, ad in cases(args.mkp_n, args.mkp_m):
        tau = np.random.default_rng(0).uniform(0.01, 1.0, ad.edge_count)
        u = iteration_uniforms(0, 0, args.ants, 1, 2 * ad.max_steps).reshape(args.ants, -1)
        py = ad.batch_kernel(_pykernels)
        t_py = best_of(lambda: py(tau, u), args.repeat) / args.ants * 1e3
        if _ckernels is None:
            print(f"{name:<18}{t_py:>15.3f}{'n/a':>15}{'':>9}  -")
            continue
        cy = ad.batch_kernel(_ckernels)
        t_cy = best_of(lambda: cy(tau, u), args.repeat) / args.ants * 1e3
        same = py(tau, u)[:2] == cy(tau, u)[:2]
        print(f"{name:<18}{t_py:>15.3f}{t_cy:>15.3f}{t_py / t_cy:>8.1f}x  {'yes' if same else 'NO'}")


if __name__ == "__main__":
    main()
