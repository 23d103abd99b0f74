"""Command-line entry point: ``aco-di {solve,sweep,gen-mmppfo,verify,oracle}``.

Exit codes: 0 ok, 2 usage/input error, 3 solver contract violation,
4 infeasible solution (verify).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .bench import (
    PROBLEMS,
    Campaign,
    emit_csv,
    load_campaign,
    load_problem,
    run_campaign,
)
from .core import ConfigError, ContractViolation, SolverConfig
from .impact import TABLE1_FUEL, table1_values
from .mkp import BRUTE_FORCE_LIMIT, MkpInstance, MkpParseError, brute_force_optimum, check_selection
from .mmppfo import (
    GeneratorError,
    GeneratorParams,
    SCHEMES,
    MmppfoSchemaError,
    Schedule,
    ScheduleEdge,
    SearchSpace,
    check_schedule,
    generate_dataset,
    mmppfo_fitness,
    save_instance,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONTRACT = 3
EXIT_INFEASIBLE = 4

# Best settings per problem when --gamma / --q0 are omitted.
PROBLEM_DEFAULTS = {
    "mkp": {"gamma": 8.0, "q0": 0.01},
    "mmppfo": {"gamma": 4.0, "q0": 0.06},
}

INPUT_ERRORS = (OSError, MkpParseError, MmppfoSchemaError, ConfigError, ValueError)


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("expected a non-empty comma-separated list")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _add_solver_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--problem", choices=PROBLEMS, required=required)
    p.add_argument("--instance", metavar="PATH", required=required)
    p.add_argument("--alpha", type=float, default=1.0, help="pheromone exponent (default 1)")
    p.add_argument("--beta", type=float, default=0.0, help="heuristic exponent (default 0)")
    p.add_argument("--gamma", type=float, help="dynamic impact exponent (mkp 8, mmppfo 4)")
    p.add_argument("--rho", type=float, default=0.1, help="evaporation rate (default 0.1)")
    p.add_argument("--q0", type=float, help="greedy pick probability (mkp 0.01, mmppfo 0.06)")
    p.add_argument("--tau-max", type=float, default=1.0)
    p.add_argument("--tau-min", type=float, default=0.001)
    p.add_argument("--iterations", type=int, default=3000)
    p.add_argument("--parallel-ants", type=int, default=16)
    p.add_argument("--sequential-ants", type=int, default=2)
    p.add_argument("--seed", type=int, default=0, help="seed of run 0; run k uses seed+k")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--best-known", type=float, help="target fitness for success/gap statistics")
    p.add_argument("--stop-on-target", action="store_true",
                   help="end a run as soon as the target is reached")
    p.add_argument("--workers", type=int, default=1, help="runs executed concurrently")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aco-di", description="Max-min ant system with dynamic impact.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("solve", help="run the solver on one instance")
    _add_solver_flags(p)
    p.add_argument("--out", metavar="PATH", help="write best solutions as JSON")

    p = sub.add_parser("sweep", help="grid over gamma and q0, written as CSV")
    _add_solver_flags(p, required=False)
    p.add_argument("--gammas", type=_float_list, help="comma-separated gamma values")
    p.add_argument("--q0s", type=_float_list, help="comma-separated q0 values")
    p.add_argument("--campaign", metavar="PATH", help="campaign JSON (replaces solver flags)")
    p.add_argument("--out", metavar="PATH", required=True, help="CSV output path")

    p = sub.add_parser("gen-mmppfo", help="generate a wafer-lot scheduling instance")
    d = GeneratorParams()
    p.add_argument("--wafer-lots", type=int, default=d.wafer_lot_count)
    p.add_argument("--total-wafers", type=int, default=d.total_wafers)
    p.add_argument("--periods", type=int, default=d.periods)
    p.add_argument("--orders", type=int, default=d.order_count)
    p.add_argument("--quantity-min", type=int, default=d.quantity_min)
    p.add_argument("--quantity-max", type=int, default=d.quantity_max)
    p.add_argument("--total-capacity", type=int, default=d.total_capacity)
    p.add_argument("--total-demand", type=int, default=d.total_demand)
    p.add_argument("--fabs", type=int, default=d.fab_count)
    p.add_argument("--product-groups", type=int, default=d.product_group_count)
    p.add_argument("--pull-in-rate", type=float, default=d.pull_in_rate)
    p.add_argument("--push-out-rate", type=float, default=d.push_out_rate)
    p.add_argument("--offload-rate", type=float, default=d.offload_rate)
    p.add_argument("--max-pull-in-weeks", type=int, default=d.max_pull_in_weeks)
    p.add_argument("--scheme", choices=SCHEMES, default=d.scheme,
                   help="how orders and capacity are laid out (default: %(default)s)")
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--out", metavar="PATH", required=True)

    p = sub.add_parser("verify", help="check a solution's feasibility and fitness")
    p.add_argument("--problem", choices=PROBLEMS, required=True)
    p.add_argument("--instance", metavar="PATH", required=True)
    p.add_argument("--solution", metavar="PATH", required=True,
                   help="JSON: solve output, item/edge index list, or assignment list")

    p = sub.add_parser("oracle", help="exact reference values")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--table1", action="store_true", help="print the route impact table")
    g.add_argument("--instance", metavar="PATH", help="exact optimum of a small instance")
    p.add_argument("--problem", choices=("mkp",), default="mkp")
    return parser


def _config(args) -> SolverConfig:
    defaults = PROBLEM_DEFAULTS[args.problem]
    return SolverConfig(
        alpha=args.alpha, beta=args.beta,
        gamma=defaults["gamma"] if args.gamma is None else args.gamma,
        rho=args.rho,
        q0=defaults["q0"] if args.q0 is None else args.q0,
        tau_max=args.tau_max, tau_min=args.tau_min, iterations=args.iterations,
        parallel_ants=args.parallel_ants, sequential_ants=args.sequential_ants,
        seed=args.seed, stop_on_target=args.stop_on_target,
    )


def _check_errors(report) -> Optional[int]:
    for cell in report.cells:
        for exc in cell.errors:
            if isinstance(exc, ContractViolation):
                print(f"error: solver contract violation: {exc}", file=sys.stderr)
                return EXIT_CONTRACT
        if cell.errors:
            print(f"error: {len(cell.errors)} run(s) failed: {cell.errors[0]}", file=sys.stderr)
            return EXIT_CONTRACT
    return None


def _fmt(v) -> str:
    return "n/a" if v is None else format(v, "g")


def cmd_solve(args) -> int:
    instance = load_problem(args.problem, args.instance)
    space = SearchSpace.build(instance) if args.problem == "mmppfo" else None
    campaign = Campaign(space or instance, _config(args), runs=args.runs, seed_base=args.seed,
                        best_known=args.best_known, workers=args.workers)
    report = run_campaign(campaign)
    code = _check_errors(report)
    if code is not None:
        return code
    cell = report.cells[0]
    cfg = campaign.config
    print(f"problem {args.problem}  gamma {cfg.gamma:g}  q0 {cfg.q0:g}  "
          f"iterations {cfg.iterations}  ants {cfg.parallel_ants}x{cfg.sequential_ants}")
    for k, r in enumerate(cell.results):
        print(f"run {k}  seed {args.seed + k}  best {r.best_fitness:g}  "
              f"first_success {_fmt(r.first_success_iteration)}  time {r.wall_time:.3f}s")
    print(f"mean {cell.mean_fitness:g}  std {cell.std_dev:g}")
    if campaign.target is not None:
        print(f"target {campaign.target:g}  success_rate {cell.success_rate:g}  "
              f"mean_success_iter {_fmt(cell.mean_success_iter)}  avg_gap {_fmt(cell.avg_gap)}%")
    if args.out:
        runs = []
        for k, r in enumerate(cell.results):
            entry = {"seed": args.seed + k, "best_fitness": r.best_fitness,
                     "best_iteration": r.best_iteration,
                     "first_success_iteration": r.first_success_iteration,
                     "solution": [int(e) for e in r.best_solution]}
            if space is None:
                entry["solution"] = sorted(entry["solution"])
            else:
                entry["assignments"] = [space.edges[e].to_json() for e in r.best_solution]
            runs.append(entry)
        doc = {"problem": args.problem, "instance": str(args.instance),
               "config": {k: v for k, v in vars(cfg).items() if k != "seed"},
               "runs": runs}
        Path(args.out).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.campaign:
        campaign = load_campaign(args.campaign, gammas=args.gammas, q0s=args.q0s)
    else:
        if not args.problem or not args.instance:
            raise UsageError("sweep needs --problem and --instance, or --campaign")
        if not args.gammas and not args.q0s:
            raise UsageError("sweep needs --gammas and/or --q0s")
        campaign = Campaign(load_problem(args.problem, args.instance), _config(args),
                            runs=args.runs, seed_base=args.seed, gammas=args.gammas,
                            q0s=args.q0s, best_known=args.best_known, workers=args.workers)
    report = run_campaign(campaign)
    code = _check_errors(report)
    if code is not None:
        return code
    emit_csv(report, args.out)
    print(f"wrote {len(report.cells)} cells to {args.out}")
    return EXIT_OK


def cmd_gen(args) -> int:
    params = GeneratorParams(
        wafer_lot_count=args.wafer_lots, total_wafers=args.total_wafers, periods=args.periods,
        order_count=args.orders, quantity_min=args.quantity_min, quantity_max=args.quantity_max,
        total_capacity=args.total_capacity, total_demand=args.total_demand, fab_count=args.fabs,
        product_group_count=args.product_groups, pull_in_rate=args.pull_in_rate,
        push_out_rate=args.push_out_rate, offload_rate=args.offload_rate,
        max_pull_in_weeks=args.max_pull_in_weeks, scheme=args.scheme, seed=args.seed,
    )
    inst = generate_dataset(params)
    save_instance(inst, args.out)
    print(f"{len(inst.wafer_lots)} wafer-lots, {inst.total_wafers} wafers, "
          f"{len(inst.orders)} orders, demand {inst.total_demand}, "
          f"capacity {inst.total_capacity}")
    print(f"tightness {inst.tightness:.3f}")
    return EXIT_OK


def _solution_payloads(doc) -> list[tuple[list, Optional[float]]]:
    """``(solution, claimed fitness)`` pairs from whatever JSON shape verify was handed."""
    if isinstance(doc, dict):
        runs = doc.get("runs")
        if not runs:
            raise ValueError("solution file has no runs")
        return [(e.get("assignments", e.get("solution")), e.get("best_fitness")) for e in runs]
    if isinstance(doc, list):
        return [(doc, None)]
    raise ValueError("solution must be a JSON list or a solve output object")


def _audit(problem: str, instance, payload, space_cache: dict):
    if not isinstance(payload, list):
        raise ValueError("a solution must be a JSON list")
    if problem == "mkp":
        if not all(isinstance(i, int) and not isinstance(i, bool) for i in payload):
            raise ValueError("mkp solutions are lists of item indices")
        return check_selection(instance, payload)
    if all(isinstance(e, dict) for e in payload):
        try:
            edges = [ScheduleEdge.from_json(e) for e in payload]
        except KeyError as exc:
            raise ValueError(f"assignment missing key {exc.args[0]!r}") from None
    else:
        if "space" not in space_cache:
            space_cache["space"] = SearchSpace.build(instance)
        space = space_cache["space"]
        if not all(isinstance(k, int) and 0 <= k < len(space.edges) for k in payload):
            raise ValueError("edge index out of range")
        edges = [space.edges[k] for k in payload]
    problems = check_schedule(instance, edges)
    if problems:
        return None, problems
    return float(mmppfo_fitness(Schedule(instance, edges))), []


def cmd_verify(args) -> int:
    instance = load_problem(args.problem, args.instance)
    doc = json.loads(Path(args.solution).read_text(encoding="utf-8"))
    cache: dict = {}
    code = EXIT_OK
    for k, (payload, claimed) in enumerate(_solution_payloads(doc)):
        fitness, problems = _audit(args.problem, instance, payload, cache)
        if not problems and claimed is not None and float(claimed) != fitness:
            problems = [f"claimed fitness {claimed:g} but recomputed {fitness:g}"]
        tag = f"run {k}: " if isinstance(doc, dict) else ""
        if problems:
            for msg in problems:
                print(f"{tag}violation: {msg}")
            code = EXIT_INFEASIBLE
        else:
            print(f"{tag}feasible  fitness {fitness:g}")
    return code


def cmd_oracle(args) -> int:
    if args.table1:
        print("fuel route impact")
        for fuel, row in zip(TABLE1_FUEL, table1_values()):
            for r, di in enumerate(row):
                print(f"{fuel} {r + 1} {di:.6g}")
        return EXIT_OK
    instance = load_problem("mkp", args.instance)
    assert isinstance(instance, MkpInstance)
    if instance.n > BRUTE_FORCE_LIMIT:
        raise UsageError(f"instance has {instance.n} items; exhaustive search is limited to "
                         f"{BRUTE_FORCE_LIMIT}")
    best, items = brute_force_optimum(instance)
    print(f"optimum {best:g}")
    print("items " + " ".join(str(i) for i in sorted(items)))
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "gen-mmppfo": cmd_gen,
            "verify": cmd_verify, "oracle": cmd_oracle}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ContractViolation as exc:
        print(f"error: solver contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (UsageError, GeneratorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
