"""MAC backtracking search with static max-degree variable ordering."""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .csp import Assignment, Instance
from .heuristics import (
    estimate_total_solution_count,
    order_lexicographic,
    order_min_conflicts,
    order_solution_count,
)
from .metareasoning import DEFAULT_GAMMA, random_deployment_ordering, value_ordering_sc
from .propagation import DomainStore, ac3, mac_assign, undo_to_checkpoint

HEURISTICS = ("lex", "mc", "sc", "vsc", "rand-sc")

# 30 minutes
DEFAULT_TIMEOUT = 1800.0


@dataclass
class RunConfig:
    heuristic: str = "vsc"
    gamma: float = DEFAULT_GAMMA
    seed: int = 0
    timeout: float = DEFAULT_TIMEOUT
    repeat: int = 1
    stop: str = "first-solution"
    # rand-sc: per-value estimation probability, and optional cap on total estimations
    rand_rate: float = 0.5
    rand_budget: Optional[int] = None
    # abort (reported as timed out) after this many value assignments
    node_limit: Optional[int] = None

    def __post_init__(self) -> None:
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown heuristic {self.heuristic!r}; expected one of {', '.join(HEURISTICS)}")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.repeat < 1:
            raise ValueError("repeat must be at least 1")
        if self.stop != "first-solution":
            raise ValueError("only the first-solution stop condition is supported")
        if not 0.0 <= self.rand_rate <= 1.0:
            raise ValueError("rand_rate must lie in [0, 1]")

    @property
    def label(self) -> str:
        if self.heuristic == "vsc":
            return f"vsc@{self.gamma:g}"
        return self.heuristic


@dataclass
class StatsRecord:
    instance: str = ""
    heuristic: str = ""
    gamma: float = 0.0
    seed: int = 0
    repeat: int = 0
    search_time: float = 0.0
    heuristic_time: float = 0.0
    backtracks: int = 0
    nodes: int = 0
    constraint_checks: int = 0
    sc_estimations: int = 0
    ordering_calls: int = 0
    value_slots: int = 0
    solved: bool = False
    timed_out: bool = False

    @property
    def config(self) -> str:
        return f"vsc@{self.gamma:g}" if self.heuristic == "vsc" else self.heuristic

    @property
    def residual_time(self) -> float:
        return self.search_time - self.heuristic_time

    def as_dict(self) -> Dict:
        return asdict(self)


class _Timeout(Exception):
    pass


def variable_order(instance: Instance) -> List[int]:
    """Descending constraint-graph degree, ties by ascending index."""
    return sorted(range(instance.num_variables), key=lambda v: (-instance.degree(v), v))


# (values in try order, per-value solution count estimates or None, estimations made)
Orderer = Callable[[DomainStore, int, float], Tuple[List[int], Optional[Dict[int, float]], int]]


def make_orderer(instance: Instance, config: RunConfig) -> Orderer:
    h = config.heuristic
    if h == "lex":
        return lambda store, var, N: (order_lexicographic(store, var).values, None, 0)
    if h == "mc":
        return lambda store, var, N: (order_min_conflicts(store, instance, var).values, None, 0)
    if h == "sc":

        def sc(store, var, N):
            o = order_solution_count(store, instance, var)
            return o.values, o.scores, len(o.values)

        return sc
    if h == "vsc":

        def vsc(store, var, N):
            r = value_ordering_sc(store, instance, var, N, config.gamma)
            return r.values, r.n, r.estimations

        return vsc

    rng = random.Random(config.seed)
    remaining = [config.rand_budget]

    def rand_sc(store, var, N):
        size = store.counts[var]
        budget = sum(rng.random() < config.rand_rate for _ in range(size))
        if remaining[0] is not None:
            budget = min(budget, remaining[0])
            remaining[0] -= budget
        r = random_deployment_ordering(store, instance, var, N, budget, rng)
        return r.values, r.n, r.estimations

    return rand_sc


def search(
    instance: Instance,
    config: Optional[RunConfig] = None,
    *,
    instance_id: str = "",
    orderer: Optional[Orderer] = None,
    trace: Optional[List[Tuple[int, Tuple[int, ...]]]] = None,
) -> Tuple[Optional[Assignment], StatsRecord]:
    """Find a first solution or prove there is none.

    Variables follow a static max-degree order.  A variable's value ordering
    is computed once per visit of its tree node and reused while
    backtracking among its values.  A backtrack is counted whenever a value
    assignment is retracted because its propagation or its subtree failed.
    """
    config = config or RunConfig()
    stats = StatsRecord(
        instance=instance_id,
        heuristic=config.heuristic,
        gamma=config.gamma if config.heuristic == "vsc" else 0.0,
        seed=config.seed,
    )
    orderer = orderer or make_orderer(instance, config)
    uses_counts = config.heuristic in ("sc", "vsc", "rand-sc")
    order = variable_order(instance)
    store = DomainStore(instance)
    start = time.perf_counter()
    deadline = start + config.timeout
    solution: Optional[Assignment] = None

    def timed(fn, *args):
        t0 = time.perf_counter()
        try:
            return fn(*args)
        finally:
            stats.heuristic_time += time.perf_counter() - t0

    try:
        if ac3(store, instance).consistent:
            root_N = timed(estimate_total_solution_count, instance, store) if uses_counts else 0.0
            solution = _dfs(
                instance, store, order, orderer, root_N, stats, deadline, config.node_limit, timed, trace
            )
        stats.solved = solution is not None
    except _Timeout:
        stats.timed_out = True
    stats.search_time = time.perf_counter() - start
    stats.constraint_checks = store.checks
    return solution, stats


@dataclass
class _Frame:
    var: int
    values: List[int]
    counts: Optional[Dict[int, float]]
    pos: int = 0
    mark: Optional[int] = None


def _dfs(instance, store, order, orderer, root_N, stats, deadline, node_limit, timed, trace) -> Optional[Assignment]:
    n = instance.num_variables
    frames: List[_Frame] = []
    N = root_N
    while True:
        if len(frames) == n:
            return {f.var: f.values[f.pos - 1] for f in frames}
        if time.perf_counter() > deadline or (node_limit is not None and stats.nodes > node_limit):
            raise _Timeout
        var = order[len(frames)]
        values, counts, estimations = timed(orderer, store, var, N)
        stats.ordering_calls += 1
        stats.value_slots += len(values)
        stats.sc_estimations += estimations
        if trace is not None:
            trace.append((var, tuple(values)))
        frames.append(_Frame(var, values, counts))

        # advance to the next viable assignment, retracting failures
        while frames:
            f = frames[-1]
            if f.mark is not None:
                undo_to_checkpoint(store, f.mark)
                f.mark = None
                stats.backtracks += 1
            if f.pos >= len(f.values):
                frames.pop()
                continue
            value = f.values[f.pos]
            f.pos += 1
            stats.nodes += 1
            result = mac_assign(store, instance, f.var, value)
            if result.consistent:
                f.mark = result.checkpoint
                N = f.counts[value] if f.counts is not None else 0.0
                break
            undo_to_checkpoint(store, result.checkpoint)
            stats.backtracks += 1
        if not frames:
            return None
