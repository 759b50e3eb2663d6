"""Stubborn-set successor pruning and its order-preserving adaptations.

Interference is syntactic and state independent, so it over-approximates
interference along strongly optimal plans; NES are the achievers of one
unsatisfied precondition fact; the seed is the set of achievers of one
unsatisfied goal fact (a disjunctive action landmark).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import AbstractSet, Sequence

from .task import Fact, State, Task, applicable_actions, is_applicable, is_goal


class PruningError(Exception):
    pass


class ActionApplicable(PruningError):
    pass


class GoalState(PruningError):
    pass


class Variant(enum.Enum):
    NONE = "none"
    STUBBORN = "stubborn"
    POR_PLUS = "por-plus"
    POGSSS = "pogsss"
    NAIVE_UNSAFE = "naive-unsafe"

    @property
    def safe(self) -> bool:
        return self is not Variant.NAIVE_UNSAFE


CHOICE_RULES = ("lowest", "highest")


def _check_rule(rule: str) -> str:
    if rule in CHOICE_RULES:
        return rule
    if rule.startswith("random:"):
        int(rule.split(":", 1)[1])
        return rule
    raise ValueError(f"unknown choice rule {rule!r}; use lowest, highest or random:<seed>")


def choose_fact(facts: Sequence[Fact], rule: str, salt=()) -> Fact:
    """Pick one of `facts` (sorted by variable) according to `rule`.

    `random:<seed>` hashes the seed with `salt` (state, action), so the pick
    is a fixed function of the query, as pruning correctness requires.
    """
    if rule == "lowest":
        return facts[0]
    if rule == "highest":
        return facts[-1]
    seed = int(rule.split(":", 1)[1])
    return facts[hash((seed, salt)) % len(facts)]


@dataclass(frozen=True)
class StubbornConfig:
    variant: Variant = Variant.STUBBORN
    x: frozenset[int] = frozenset()
    nes_choice: str = "lowest"
    goal_choice: str = "lowest"

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "x", frozenset(self.x))
        _check_rule(self.nes_choice)
        _check_rule(self.goal_choice)

    def echo(self) -> dict:
        return {
            "variant": self.variant.value,
            "x": sorted(self.x),
            "nes_choice": self.nes_choice,
            "goal_choice": self.goal_choice,
        }


NO_PRUNING = StubbornConfig(Variant.NONE)


def disables(task: Task, o: int, o2: int) -> bool:
    """o's effect sets a variable of pre(o2) to a value other than required."""
    pre2 = task.actions[o2].pre_dict
    return any(v in pre2 and pre2[v] != d for v, d in task.actions[o].eff)


def conflicts(task: Task, o: int, o2: int) -> bool:
    eff2 = task.actions[o2].eff_dict
    return any(v in eff2 and eff2[v] != d for v, d in task.actions[o].eff)


def interfere(task: Task, o: int, o2: int) -> bool:
    return disables(task, o, o2) or disables(task, o2, o) or conflicts(task, o, o2)


class InterferenceMatrix:
    """Symmetric interference relation, precomputed for all action pairs."""

    def __init__(self, task: Task):
        n = len(task.actions)
        by_var_eff: dict[int, list[int]] = {}
        by_var_pre: dict[int, list[int]] = {}
        for act in task.actions:
            for v in act.eff_dict:
                by_var_eff.setdefault(v, []).append(act.id)
            for v in act.pre_dict:
                by_var_pre.setdefault(v, []).append(act.id)
        rows: list[set[int]] = [set() for _ in range(n)]
        for act in task.actions:
            # only actions sharing a touched variable can interfere
            candidates = set()
            for v in act.eff_dict:
                candidates.update(by_var_eff.get(v, ()))
                candidates.update(by_var_pre.get(v, ()))
            for v in act.pre_dict:
                candidates.update(by_var_eff.get(v, ()))
            for other in candidates:
                if interfere(task, act.id, other):
                    rows[act.id].add(other)
                    rows[other].add(act.id)
        self._rows = tuple(frozenset(r) for r in rows)

    def __getitem__(self, o: int) -> frozenset[int]:
        return self._rows[o]

    def __call__(self, o: int, o2: int) -> bool:
        return o2 in self._rows[o]

    def __len__(self) -> int:
        return len(self._rows)


def unsatisfied(facts, state: State) -> list[Fact]:
    return [(v, d) for v, d in facts if state[v] != d]


def nes(task: Task, state: State, o: int, rule: str = "lowest") -> frozenset[int]:
    """Achievers of one unsatisfied precondition fact of inapplicable `o`."""
    missing = unsatisfied(task.actions[o].pre, state)
    if not missing:
        raise ActionApplicable(f"{task.actions[o].name!r} is applicable in {state}")
    fact = choose_fact(missing, rule, (state, o))
    return frozenset(task.achievers.get(fact, ()))


def goal_seed(task: Task, state: State, rule: str = "lowest") -> frozenset[int]:
    missing = unsatisfied(task.goal, state)
    if not missing:
        raise GoalState(f"{state} satisfies the goal")
    fact = choose_fact(missing, rule, (state, -1))
    return frozenset(task.achievers.get(fact, ()))


def compute_stubborn(
    task: Task,
    state: State,
    config: StubbornConfig,
    interference: InterferenceMatrix | None = None,
) -> frozenset[int]:
    """Closure of the goal seed under NES, interference and, for PO-GSSS,
    the rule that an applicable member of X pulls in all of X."""
    if interference is None:
        interference = InterferenceMatrix(task)
    pull_x = config.variant is Variant.POGSSS
    stubborn = set(goal_seed(task, state, config.goal_choice))
    queue = list(stubborn)
    while queue:
        o = queue.pop()
        if is_applicable(task, state, o):
            new = interference[o]
            if pull_x and o in config.x:
                new = new | config.x
        else:
            new = nes(task, state, o, config.nes_choice)
        for o2 in new:
            if o2 not in stubborn:
                stubborn.add(o2)
                queue.append(o2)
    return frozenset(stubborn)


def _reduce(applicable: list[int], stubborn: AbstractSet[int], variant: Variant, x: AbstractSet[int]) -> list[int]:
    pruned = [o for o in applicable if o in stubborn]
    if variant in (Variant.STUBBORN, Variant.POGSSS):
        return pruned
    if not x.intersection(pruned):
        return pruned
    if variant is Variant.POR_PLUS:
        if x.issubset(applicable):
            keep = stubborn | x
            return [o for o in applicable if o in keep]
        return applicable
    if variant is Variant.NAIVE_UNSAFE:
        return [o for o in applicable if o in stubborn or o in x]
    raise ValueError(variant)


def successors(task: Task, state: State, config: StubbornConfig, interference=None) -> tuple[int, ...]:
    """Applicable actions kept by the configured pruning, in id order.

    Goal states are never pruned.
    """
    applicable = applicable_actions(task, state)
    if config.variant is Variant.NONE or is_goal(task, state):
        return tuple(applicable)
    stubborn = compute_stubborn(task, state, config, interference)
    return tuple(_reduce(applicable, stubborn, config.variant, config.x))


@dataclass
class Pruner:
    """Successor function bound to one task and config, memoised per state.

    Not thread safe: the memo belongs to a single search run.
    """

    task: Task
    config: StubbornConfig = NO_PRUNING
    _interference: InterferenceMatrix | None = field(default=None, repr=False)
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.config.variant is not Variant.NONE and self._interference is None:
            self._interference = InterferenceMatrix(self.task)

    def __call__(self, state: State) -> tuple[int, ...]:
        succ = self._memo.get(state)
        if succ is None:
            succ = successors(self.task, state, self.config, self._interference)
            self._memo[state] = succ
        return succ
