"""Multi-dimensional knapsack: instances, Dynamic Impact, adapter and oracle.

Instance files are whitespace-separated numbers::

    n m optimum
    p_1 ... p_n
    w_11 ... w_1n        (one row per constraint)
    ...
    c_1 ... c_m

An optimum of 0 means "unknown".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from ._pykernels import WEIGHTLESS_IMPACT
from .core import ProblemAdapter, Sense, SolverConfig

__all__ = [
    "MkpInstance",
    "MkpState",
    "MkpParseError",
    "WEIGHTLESS_IMPACT",
    "parse_mkp",
    "load_mkp",
    "format_mkp",
    "random_mkp",
    "feasible_items",
    "normalized_profit",
    "capacity_impact",
    "dynamic_impact_mkp",
    "mkp_fitness",
    "check_selection",
    "brute_force_optimum",
    "MkpAdapter",
    "BRUTE_FORCE_LIMIT",
]

BRUTE_FORCE_LIMIT = 24


class MkpParseError(ValueError):
    def __init__(self, message: str, position: Optional[int] = None) -> None:
        self.position = position
        if position is not None:
            message = f"{message} (token {position})"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class MkpInstance:
    profits: np.ndarray
    weights: np.ndarray  # shape (m, n)
    capacities: np.ndarray
    known_optimum: Optional[float] = None
    name: str = ""

    def __post_init__(self) -> None:
        p = np.asarray(self.profits, dtype=np.float64)
        w = np.atleast_2d(np.asarray(self.weights, dtype=np.float64))
        c = np.asarray(self.capacities, dtype=np.float64)
        object.__setattr__(self, "profits", p)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "capacities", c)
        if p.ndim != 1 or c.ndim != 1 or w.shape != (len(c), len(p)):
            raise ValueError(f"inconsistent dimensions: profits {p.shape}, "
                             f"weights {w.shape}, capacities {c.shape}")
        if len(p) == 0:
            raise ValueError("instance has no items")
        if np.any(p <= 0):
            raise ValueError("profits must be > 0")
        if np.any(w < 0):
            raise ValueError("weights must be >= 0")
        if np.any(c <= 0):
            raise ValueError("capacities must be > 0")
        p.flags.writeable = w.flags.writeable = c.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.profits)

    @property
    def m(self) -> int:
        return len(self.capacities)

    @property
    def normalized_profits(self) -> np.ndarray:
        return self.profits / self.profits.max()

    def __eq__(self, other) -> bool:
        if not isinstance(other, MkpInstance):
            return NotImplemented
        return (np.array_equal(self.profits, other.profits)
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.capacities, other.capacities)
                and self.known_optimum == other.known_optimum)


@dataclass
class MkpState:
    selected: list[int] = field(default_factory=list)
    remaining_capacity: list[float] = field(default_factory=list)
    profit_accum: float = 0.0
    _taken: set = field(default_factory=set, repr=False)

    @classmethod
    def empty(cls, instance: MkpInstance) -> "MkpState":
        return cls([], [float(c) for c in instance.capacities], 0.0, set())

    @classmethod
    def from_items(cls, instance: MkpInstance, items: Sequence[int]) -> "MkpState":
        st = cls.empty(instance)
        for i in items:
            st.add(instance, int(i))
        return st

    def add(self, instance: MkpInstance, item: int) -> None:
        if item in self._taken:
            raise ValueError(f"item {item} already selected")
        for j in range(instance.m):
            w = float(instance.weights[j, item])
            if w > self.remaining_capacity[j]:
                raise ValueError(f"item {item} exceeds capacity of knapsack {j}")
        for j in range(instance.m):
            self.remaining_capacity[j] -= float(instance.weights[j, item])
        self.selected.append(item)
        self._taken.add(item)
        self.profit_accum += float(instance.profits[item])

    def __contains__(self, item: int) -> bool:
        return item in self._taken


def parse_mkp(data: Union[bytes, str], name: str = "") -> MkpInstance:
    text = data.decode("ascii") if isinstance(data, bytes) else data
    tokens = text.split()
    pos = 0

    def take(count: int, what: str) -> list[float]:
        nonlocal pos
        if pos + count > len(tokens):
            raise MkpParseError(f"expected {count} values for {what}, found "
                                f"{len(tokens) - pos}", pos)
        out = []
        for k in range(count):
            try:
                out.append(float(tokens[pos + k]))
            except ValueError:
                raise MkpParseError(f"not a number: {tokens[pos + k]!r}", pos + k) from None
        pos += count
        return out

    n, m, opt = take(3, "header (n m optimum)")
    if n != int(n) or n < 1 or m != int(m) or m < 1:
        raise MkpParseError(f"bad header: n={n} m={m}", 0)
    n, m = int(n), int(m)
    profits = take(n, "profits")
    weights = [take(n, f"weights of constraint {j}") for j in range(m)]
    capacities = take(m, "capacities")
    if pos != len(tokens):
        raise MkpParseError(f"{len(tokens) - pos} unexpected trailing values", pos)
    if any(c < 0 for c in capacities):
        raise ValueError("negative capacity")
    return MkpInstance(np.array(profits), np.array(weights), np.array(capacities),
                       known_optimum=opt if opt != 0 else None, name=name)


def load_mkp(path: Union[str, Path]) -> MkpInstance:
    path = Path(path)
    return parse_mkp(path.read_bytes(), name=path.stem)


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def format_mkp(instance: MkpInstance) -> str:
    lines = [f"{instance.n} {instance.m} {_num(instance.known_optimum or 0)}",
             " ".join(_num(p) for p in instance.profits)]
    lines += [" ".join(_num(w) for w in row) for row in instance.weights]
    lines.append(" ".join(_num(c) for c in instance.capacities))
    return "\n".join(lines) + "\n"


def random_mkp(n: int, m: int, seed: int, tightness: float = 0.5,
               max_weight: int = 100, max_profit: int = 100) -> MkpInstance:
    """Uncorrelated integer instance with capacities at ``tightness`` of total weight."""
    rng = np.random.default_rng(seed)
    weights = rng.integers(1, max_weight + 1, size=(m, n)).astype(float)
    profits = rng.integers(1, max_profit + 1, size=n).astype(float)
    capacities = np.maximum(1.0, np.floor(weights.sum(axis=1) * tightness))
    return MkpInstance(profits, weights, capacities, name=f"rand-{n}x{m}-{seed}")


def feasible_items(instance: MkpInstance, state: MkpState) -> list[int]:
    rc = state.remaining_capacity
    out = []
    for i in range(instance.n):
        if i in state:
            continue
        if all(instance.weights[j, i] <= rc[j] for j in range(instance.m)):
            out.append(i)
    return out


def normalized_profit(instance: MkpInstance, item: int) -> float:
    return float(instance.profits[item] / instance.profits.max())


def capacity_impact(instance: MkpInstance, state: MkpState, item: int) -> float:
    """Largest plus mean share of each remaining capacity the item would use."""
    rc = state.remaining_capacity
    mx = 0.0
    sm = 0.0
    for j in range(instance.m):
        w = float(instance.weights[j, item])
        if w > 0.0:
            if w > rc[j]:
                raise ValueError(f"item {item} does not fit knapsack {j}")
            r = w / rc[j]
            if r > mx:
                mx = r
            sm += r
    return mx + sm / instance.m


def dynamic_impact_mkp(instance: MkpInstance, state: MkpState, item: int,
                       _norm: Optional[np.ndarray] = None) -> float:
    ci = capacity_impact(instance, state, item)
    if ci == 0.0:
        return WEIGHTLESS_IMPACT
    npf = float(_norm[item]) if _norm is not None else normalized_profit(instance, item)
    return npf / ci


def mkp_fitness(instance: MkpInstance, state: MkpState) -> float:
    return float(sum(float(instance.profits[i]) for i in state.selected))


def check_selection(instance: MkpInstance, items: Sequence[int]) -> tuple[float, list[str]]:
    """Independent feasibility check.  Returns ``(profit, violations)``."""
    problems = []
    seen = set()
    for i in items:
        if not 0 <= i < instance.n:
            problems.append(f"item {i} out of range")
        elif i in seen:
            problems.append(f"item {i} selected twice")
        seen.add(i)
    valid = [i for i in seen if 0 <= i < instance.n]
    used = instance.weights[:, valid].sum(axis=1) if valid else np.zeros(instance.m)
    for j in range(instance.m):
        if used[j] > instance.capacities[j]:
            problems.append(f"knapsack {j}: load {_num(used[j])} exceeds capacity "
                            f"{_num(instance.capacities[j])}")
    return float(instance.profits[valid].sum()) if valid else 0.0, problems


def brute_force_optimum(instance: MkpInstance) -> tuple[float, frozenset]:
    """Exhaustive search over all 2**n subsets (n <= 24).

    Ties go to the lexicographically smallest sorted item tuple.
    """
    n = instance.n
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force refused for n={n} > {BRUTE_FORCE_LIMIT}")
    P = instance.profits
    W = instance.weights.T  # (n, m)
    cap = instance.capacities
    best = -1.0
    best_masks: list[int] = []
    chunk = 1 << min(n, 16)
    bits = np.arange(n, dtype=np.int64)
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        x = ((masks[:, None] >> bits) & 1).astype(np.float64)
        ok = np.all(x @ W <= cap, axis=1)
        if not ok.any():
            continue
        prof = x @ P
        prof[~ok] = -1.0
        top = prof.max()
        if top > best:
            best = top
            best_masks = masks[prof == top].tolist()
        elif top == best:
            best_masks.extend(masks[prof == top].tolist())
    sets = [tuple(i for i in range(n) if mk >> i & 1) for mk in best_masks]
    return float(best), frozenset(min(sets))


class MkpAdapter(ProblemAdapter):
    """One edge per item; the heuristic term is constant 1."""

    sense = Sense.MAXIMIZE

    def __init__(self, instance: MkpInstance, config: SolverConfig) -> None:
        self.instance = instance
        self.config = config
        self._norm = instance.normalized_profits
        self._eta = np.ones(instance.n)

    @property
    def edge_count(self) -> int:
        return self.instance.n

    @property
    def max_steps(self) -> int:
        return self.instance.n

    def new_state(self) -> MkpState:
        return MkpState.empty(self.instance)

    def candidates(self, state: MkpState) -> list[int]:
        return feasible_items(self.instance, state)

    def dynamic_impact(self, state: MkpState, edge: int) -> float:
        return dynamic_impact_mkp(self.instance, state, edge, self._norm)

    def apply(self, state: MkpState, edge: int) -> None:
        state.add(self.instance, edge)

    def solution(self, state: MkpState) -> list[int]:
        return list(state.selected)

    def fitness(self, state: MkpState) -> float:
        return state.profit_accum

    def evaluate(self, solution: Sequence[int]) -> float:
        profit, problems = check_selection(self.instance, solution)
        if problems:
            raise ValueError("; ".join(problems))
        return profit

    def batch_kernel(self, kernels=None):
        k = kernels or _kernels
        inst, cfg = self.instance, self.config

        def construct(tau, uniforms):
            return k.mkp_construct(self._norm, inst.profits, inst.weights, inst.capacities,
                                   tau, self._eta, cfg.alpha, cfg.beta, cfg.gamma, cfg.q0,
                                   uniforms)

        return construct

