"""Optimal cost and exhaustive cost-bounded plan enumeration."""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import AbstractSet, Optional

from .equivalence import Plan, quotient_filter
from .pruning import NO_PRUNING, Pruner, StubbornConfig, Variant
from .task import Task, apply, is_goal


class SearchError(Exception):
    pass


class UnsolvableWithMultiplier(SearchError):
    pass


class LimitExceeded(SearchError):
    """Raised when max_plans or node_budget is hit. Carries the partial
    (incomplete) result."""

    def __init__(self, message, plans=(), stats=None):
        super().__init__(message)
        self.plans = list(plans)
        self.stats = stats


@dataclass(frozen=True)
class Bound:
    mode: str
    value: Fraction

    def __post_init__(self):
        if self.mode not in ("multiplier", "absolute"):
            raise ValueError(f"bound mode must be multiplier or absolute, got {self.mode!r}")
        value = Fraction(self.value)
        if self.mode == "multiplier" and value < 1:
            raise ValueError("quality multiplier must be >= 1")
        if value < 0:
            raise ValueError("bound must be nonnegative")
        object.__setattr__(self, "value", value)

    @classmethod
    def multiplier(cls, q=1) -> "Bound":
        return cls("multiplier", Fraction(q))

    @classmethod
    def absolute(cls, cost) -> "Bound":
        return cls("absolute", Fraction(cost))

    def resolve(self, task: Task, config: StubbornConfig = NO_PRUNING) -> int:
        """Absolute integer cost bound for `task`."""
        if self.mode == "absolute":
            return math.floor(self.value)
        opt = optimal_cost(task, config)
        if opt is None:
            raise UnsolvableWithMultiplier("no plan exists, so a quality multiplier has no reference cost")
        return math.floor(self.value * opt)


@dataclass(frozen=True)
class SearchLimits:
    max_plans: Optional[int] = None
    max_plan_length: Optional[int] = None
    node_budget: Optional[int] = None

    def __post_init__(self):
        for name in ("max_plans", "max_plan_length", "node_budget"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")

    def plan_length(self, task: Task) -> int:
        if self.max_plan_length is not None:
            return self.max_plan_length
        return default_max_length(task)


def default_max_length(task: Task) -> int:
    return 2 * sum(v.domain_size for v in task.variables)


@dataclass
class SearchStats:
    expansions: int = 0
    generated: int = 0
    pruned_successors: int = 0
    plans_found: int = 0
    classes_found: Optional[int] = None
    wall_time: float = 0.0
    bound: Optional[int] = None
    max_plan_length: Optional[int] = None
    length_truncated: bool = False
    complete: bool = True

    def as_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("wall_time")
        return d


def optimal_cost(task: Task, config: StubbornConfig = NO_PRUNING) -> Optional[int]:
    """Uniform-cost search with a closed list over the (pruned) space.
    Returns None when no goal state is reachable."""
    succ = Pruner(task, config)
    best = {task.initial: 0}
    frontier = [(0, task.initial)]
    while frontier:
        g, state = heapq.heappop(frontier)
        if g > best[state]:
            continue
        if is_goal(task, state):
            return g
        for a in succ(state):
            child = apply(task, state, a)
            g2 = g + task.actions[a].cost
            if g2 < best.get(child, math.inf):
                best[child] = g2
                heapq.heappush(frontier, (g2, child))
    return None


def enumerate_plans(
    task: Task,
    bound: Bound,
    config: StubbornConfig = NO_PRUNING,
    limits: SearchLimits = SearchLimits(),
) -> tuple[list[Plan], SearchStats]:
    """All goal-reaching paths in the pruned space with cost <= bound.

    Depth-first over (state, path) with no duplicate detection: two paths to
    the same state are different plans. Goal states are reported and then
    expanded further. Output is sorted by (cost, action ids).
    """
    start = time.perf_counter()
    absolute = bound.resolve(task, config)
    max_len = limits.plan_length(task)
    stats = SearchStats(bound=absolute, max_plan_length=max_len)
    succ = Pruner(task, config)
    costs = [a.cost for a in task.actions]
    plans: list[Plan] = []

    def finish(complete: bool) -> list[Plan]:
        plans.sort()
        stats.plans_found = len(plans)
        stats.complete = complete and not stats.length_truncated
        stats.wall_time = time.perf_counter() - start
        return plans

    stack = [(task.initial, 0, ())]
    while stack:
        state, g, path = stack.pop()
        if is_goal(task, state):
            plans.append(Plan(g, path))
            if limits.max_plans is not None and len(plans) > limits.max_plans:
                plans.pop()
                finish(False)
                raise LimitExceeded(f"more than {limits.max_plans} plans within bound", plans, stats)
        if len(path) >= max_len:
            if any(g + costs[a] <= absolute for a in succ(state)):
                stats.length_truncated = True
            continue
        if limits.node_budget is not None and stats.expansions >= limits.node_budget:
            finish(False)
            raise LimitExceeded(f"node budget of {limits.node_budget} expansions exhausted", plans, stats)
        stats.expansions += 1
        kept = succ(state)
        n_app = _count_applicable(task, state, kept, config)
        stats.generated += n_app
        stats.pruned_successors += n_app - len(kept)
        for a in reversed(kept):
            g2 = g + costs[a]
            if g2 <= absolute:
                stack.append((apply(task, state, a), g2, path + (a,)))
    return finish(True), stats


def _count_applicable(task: Task, state, kept, config: StubbornConfig) -> int:
    if config.variant is Variant.NONE:
        return len(kept)
    return sum(1 for a in task.actions if all(state[v] == d for v, d in a.pre))


def solve_potq(
    task: Task,
    x: AbstractSet[int],
    bound: Bound,
    config: StubbornConfig = NO_PRUNING,
    limits: SearchLimits = SearchLimits(),
) -> tuple[list[Plan], SearchStats]:
    """One representative plan per equivalence class of plans within bound."""
    plans, stats = enumerate_plans(task, bound, config, limits)
    reps = quotient_filter(plans, x)
    stats.classes_found = len(reps)
    return reps, stats
