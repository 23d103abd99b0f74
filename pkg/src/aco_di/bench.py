"""Multi-run campaigns, gamma x q0 sweeps and their summary statistics."""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .core import ConfigError, ProblemAdapter, RunResult, Sense, SolverConfig, run
from .mkp import MkpAdapter, MkpInstance, load_mkp
from .mmppfo import MmppfoAdapter, MmppfoInstance, SearchSpace, load_instance

log = logging.getLogger(__name__)

__all__ = [
    "PROBLEMS",
    "Campaign",
    "CellReport",
    "CampaignReport",
    "load_problem",
    "adapter_factory",
    "run_campaign",
    "success_rate",
    "average_gap",
    "emit_csv",
    "read_csv",
    "load_campaign",
]

PROBLEMS = ("mkp", "mmppfo")

CSV_HEADER = ("gamma", "q0", "runs", "mean_fitness", "std_dev", "success_rate",
              "mean_success_iter", "mean_wall_time_s", "avg_gap_pct")


def load_problem(problem: str, path: Union[str, Path]):
    if problem == "mkp":
        return load_mkp(path)
    if problem == "mmppfo":
        return load_instance(path)
    raise ConfigError(f"unknown problem {problem!r}")


def adapter_factory(instance, config: SolverConfig) -> Callable[[], ProblemAdapter]:
    """A zero-argument adapter constructor; the MMPPFO search space is built once."""
    if isinstance(instance, MkpInstance):
        return lambda: MkpAdapter(instance, config)
    if isinstance(instance, MmppfoInstance):
        instance = SearchSpace.build(instance)
    if isinstance(instance, SearchSpace):
        return lambda: MmppfoAdapter(instance, config)
    raise TypeError(f"no adapter for {type(instance).__name__}")


def _sense_of(instance) -> Sense:
    return Sense.MAXIMIZE if isinstance(instance, MkpInstance) else Sense.MINIMIZE


@dataclass(frozen=True)
class Campaign:
    """``runs`` seeded runs per (gamma, q0) cell.

    Seeds are ``seed_base + k`` in every cell so contrasts between cells are
    paired.  A missing axis falls back to the template's value.
    """

    instance: object
    config: SolverConfig = field(default_factory=SolverConfig)
    runs: int = 1
    seed_base: int = 0
    gammas: Optional[tuple[float, ...]] = None
    q0s: Optional[tuple[float, ...]] = None
    best_known: Optional[float] = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        for name in ("gammas", "q0s"):
            axis = getattr(self, name)
            if axis is not None:
                if len(axis) == 0:
                    raise ConfigError(f"{name} axis is empty")
                object.__setattr__(self, name, tuple(float(v) for v in axis))
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @property
    def target(self) -> Optional[float]:
        if self.best_known is not None:
            return self.best_known
        return getattr(self.instance, "known_optimum", None)

    def cells(self) -> list[tuple[float, float]]:
        gammas = self.gammas or (self.config.gamma,)
        q0s = self.q0s or (self.config.q0,)
        return [(g, q) for g in gammas for q in q0s]

    def cell_config(self, gamma: float, q0: float, k: int) -> SolverConfig:
        kw = dict(gamma=gamma, q0=q0, seed=self.seed_base + k)
        if self.target is not None and self.config.target_fitness is None:
            kw["target_fitness"] = self.target
        return self.config.replace(**kw)


@dataclass
class CellReport:
    gamma: float
    q0: float
    results: list[Optional[RunResult]]
    errors: list[BaseException]
    mean_fitness: Optional[float]
    std_dev: Optional[float]
    success_rate: float
    mean_success_iter: Optional[float]
    mean_wall_time: Optional[float]
    avg_gap: Optional[float]

    @property
    def runs(self) -> int:
        return len(self.results)

    @property
    def failed(self) -> int:
        return sum(r is None for r in self.results)


@dataclass
class CampaignReport:
    cells: list[CellReport]

    def cell(self, gamma: float, q0: float) -> CellReport:
        for c in self.cells:
            if c.gamma == gamma and c.q0 == q0:
                return c
        raise KeyError((gamma, q0))


def success_rate(results: Sequence[Optional[RunResult]], optimum: float,
                 sense: Sense = Sense.MAXIMIZE) -> float:
    """Fraction of runs whose best fitness reached ``optimum``; failed runs count as misses."""
    if not results:
        return 0.0
    hits = sum(r is not None and r.best_fitness is not None and sense.reached(r.best_fitness, optimum)
               for r in results)
    return hits / len(results)


def average_gap(results: Sequence[Union[RunResult, float]], best_known: float) -> float:
    """Percent shortfall of the mean best fitness from ``best_known``, 2 decimals."""
    values = [r.best_fitness if isinstance(r, RunResult) else float(r) for r in results]
    if not values:
        raise ValueError("no results to average")
    if best_known == 0:
        raise ZeroDivisionError("best_known is 0")
    mean = math.fsum(values) / len(values)
    return round((best_known - mean) / best_known * 100.0, 2)


def _summarize(gamma: float, q0: float, results: list, errors: list, campaign: Campaign,
               sense: Sense) -> CellReport:
    done = [r for r in results if r is not None and r.best_fitness is not None]
    fits = np.array([r.best_fitness for r in done], dtype=float)
    target = campaign.target
    succ_iters = [r.first_success_iteration for r in done if r.first_success_iteration is not None]
    return CellReport(
        gamma=gamma,
        q0=q0,
        results=results,
        errors=errors,
        mean_fitness=float(fits.mean()) if len(fits) else None,
        std_dev=float(fits.std()) if len(fits) else None,
        success_rate=success_rate(results, target, sense) if target is not None else 0.0,
        mean_success_iter=float(np.mean(succ_iters)) if succ_iters else None,
        mean_wall_time=float(np.mean([r.wall_time for r in done])) if done else None,
        avg_gap=average_gap(done, target) if target and done else None,
    )


def run_campaign(campaign: Campaign) -> CampaignReport:
    inst = campaign.instance
    if isinstance(inst, MmppfoInstance):
        inst = SearchSpace.build(inst)
    sense = _sense_of(campaign.instance)
    jobs = [(g, q, k) for g, q in campaign.cells() for k in range(campaign.runs)]

    def one(job):
        g, q, k = job
        cfg = campaign.cell_config(g, q, k)
        try:
            threads = 1 if campaign.workers > 1 else None
            return run(adapter_factory(inst, cfg), cfg, threads=threads), None
        except Exception as exc:  # one bad run must not sink the campaign
            log.error("run gamma=%s q0=%s seed=%d failed: %s", g, q, cfg.seed, exc)
            return None, exc

    if campaign.workers > 1:
        with ThreadPoolExecutor(max_workers=campaign.workers) as pool:
            outcomes = list(pool.map(one, jobs))
    else:
        outcomes = [one(j) for j in jobs]

    cells = []
    for ci, (g, q) in enumerate(campaign.cells()):
        chunk = outcomes[ci * campaign.runs:(ci + 1) * campaign.runs]
        results = [r for r, _ in chunk]
        errors = [e for _, e in chunk if e is not None]
        cells.append(_summarize(g, q, results, errors, campaign, sense))
    return CampaignReport(cells)


def _fmt(v: Optional[float], spec: str) -> str:
    return "" if v is None else format(v, spec)


def emit_csv(report: CampaignReport, path: Union[str, Path]) -> None:
    """One row per cell; std_dev is the population standard deviation; absent values are empty."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in report.cells:
            w.writerow([
                format(c.gamma, "g"), format(c.q0, "g"), c.runs,
                _fmt(c.mean_fitness, ".6f"), _fmt(c.std_dev, ".6f"),
                format(c.success_rate, ".4f"), _fmt(c.mean_success_iter, ".4f"),
                _fmt(c.mean_wall_time, ".6f"), _fmt(c.avg_gap, ".2f"),
            ])


def read_csv(path: Union[str, Path]) -> list[dict]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append({k: (None if v == "" else int(v) if k == "runs" else float(v))
                         for k, v in row.items()})
    return rows


def load_campaign(path: Union[str, Path], **overrides) -> Campaign:
    """Campaign from JSON: ``{"problem", "instance", "runs", "seed_base", "gammas",
    "q0s", "best_known", "workers", "config": {SolverConfig fields}}``.

    A relative instance path is resolved against the JSON file's directory.
    """
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        problem = data["problem"]
        inst_path = Path(data["instance"])
    except KeyError as exc:
        raise ConfigError(f"campaign file missing key {exc.args[0]!r}") from None
    if not inst_path.is_absolute():
        inst_path = path.parent / inst_path
    known = {f.name for f in fields(SolverConfig)}
    cfg = data.get("config", {})
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return Campaign(
        instance=load_problem(problem, inst_path),
        config=SolverConfig(**cfg),
        runs=int(data.get("runs", 1)),
        seed_base=int(data.get("seed_base", 0)),
        gammas=data.get("gammas"),
        q0s=data.get("q0s"),
        best_known=data.get("best_known"),
        workers=int(data.get("workers", 1)),
    )
