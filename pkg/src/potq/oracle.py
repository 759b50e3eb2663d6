"""Brute-force ground truth and machine checks of pruning safety.

Everything here walks the unpruned state space with its own code path so it
can be used to check `search` and `pruning` rather than reuse them.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import AbstractSet, Callable, Iterator, Optional, Sequence

from .equivalence import Plan, equiv_key
from .pruning import StubbornConfig, Variant
from .search import Bound, LimitExceeded, SearchLimits, default_max_length, enumerate_plans, optimal_cost
from .task import Action, State, Task, Variable, write_sas


class OracleIncomplete(Exception):
    pass


DEFAULT_PATH_BUDGET = 500_000
PRE_DENSITY = 0.2


def brute_force_plans(
    task: Task,
    absolute_bound: int,
    max_len: Optional[int] = None,
    path_budget: int = DEFAULT_PATH_BUDGET,
    start: Optional[State] = None,
) -> list[Plan]:
    """Every action sequence from `start` (default s0) reaching the goal with
    cost <= bound and length <= max_len, sorted by (cost, ids)."""
    if max_len is None:
        max_len = default_max_length(task)
    acts = [(a.id, a.pre, a.eff, a.cost) for a in task.actions]
    goal = task.goal
    plans: list[Plan] = []
    visited = 0

    def walk(state: list[int], g: int, path: list[int]) -> None:
        nonlocal visited
        visited += 1
        if visited > path_budget:
            raise LimitExceeded(f"brute force visited more than {path_budget} paths", plans)
        if all(state[v] == d for v, d in goal):
            plans.append(Plan(g, tuple(path)))
        if len(path) == max_len:
            return
        for aid, pre, eff, cost in acts:
            if g + cost > absolute_bound or any(state[v] != d for v, d in pre):
                continue
            saved = [(v, state[v]) for v, _ in eff]
            for v, d in eff:
                state[v] = d
            path.append(aid)
            walk(state, g + cost, path)
            path.pop()
            for v, d in saved:
                state[v] = d

    walk(list(task.initial if start is None else start), 0, [])
    return sorted(plans)


def reachable_states(task: Task, absolute_bound: int, max_len: Optional[int] = None) -> list[State]:
    """States reachable from s0 by a path of cost <= bound and length <= max_len."""
    if max_len is None:
        max_len = default_max_length(task)
    best: dict[State, int] = {task.initial: 0}
    layer = {task.initial: 0}
    for _ in range(max_len):
        nxt: dict[State, int] = {}
        for state, g in layer.items():
            for a in task.actions:
                if g + a.cost > absolute_bound or any(state[v] != d for v, d in a.pre):
                    continue
                values = list(state)
                for v, d in a.eff:
                    values[v] = d
                child, g2 = tuple(values), g + a.cost
                if g2 < best.get(child, absolute_bound + 1):
                    best[child] = g2
                    nxt[child] = g2
        if not nxt:
            break
        layer = nxt
    return sorted(best)


@dataclass
class SafetyReport:
    task_id: str
    x: list[int]
    variant: str
    bound: int
    max_plan_length: int
    exhaustive: bool
    states_checked: int = 0
    full_plan_count: int = 0
    pruned_plan_count: int = 0
    full_class_count: int = 0
    covered_class_count: int = 0
    violations: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def safe(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def _as_config(variant, x, nes_choice, goal_choice) -> StubbornConfig:
    if isinstance(variant, StubbornConfig):
        return replace(variant, x=frozenset(x))
    return StubbornConfig(Variant(variant), frozenset(x), nes_choice, goal_choice)


def check_safety(
    task: Task,
    x: AbstractSet[int],
    variant,
    bound: Bound,
    limits: SearchLimits = SearchLimits(),
    *,
    exhaustive: bool = False,
    nes_choice: str = "lowest",
    goal_choice: str = "lowest",
    task_id: str = "task",
    path_budget: int = DEFAULT_PATH_BUDGET,
) -> SafetyReport:
    """Check that every equivalence class of plans within the bound has a
    member in the pruned space, from s0 or (exhaustive) from every state
    reachable within the bound."""
    config = _as_config(variant, x, nes_choice, goal_choice)
    try:
        absolute = bound.resolve(task)
    except Exception as e:
        raise OracleIncomplete(str(e)) from e
    max_len = limits.plan_length(task)
    report = SafetyReport(
        task_id, sorted(config.x), config.variant.value, absolute, max_len, exhaustive, config=config.echo()
    )
    starts = reachable_states(task, absolute, max_len) if exhaustive else [task.initial]
    sub_limits = replace(limits, max_plan_length=max_len)
    for state in starts:
        sub = task if state == task.initial else task.with_initial(state)
        try:
            full = brute_force_plans(sub, absolute, max_len, path_budget)
            pruned, _ = enumerate_plans(sub, Bound.absolute(absolute), config, sub_limits)
        except LimitExceeded as e:
            raise OracleIncomplete(f"enumeration from {state} did not complete: {e}") from e
        classes: dict = {}
        for plan in full:
            classes.setdefault(equiv_key(plan, config.x), plan)
        covered = {equiv_key(p, config.x) for p in pruned}
        report.states_checked += 1
        report.full_plan_count += len(full)
        report.pruned_plan_count += len(pruned)
        report.full_class_count += len(classes)
        for key, witness in classes.items():
            if key in covered:
                report.covered_class_count += 1
            else:
                report.violations.append(
                    {
                        "state": list(state),
                        "witness": list(witness.actions),
                        "witness_names": witness.names(task),
                        "restricted": list(key.restricted),
                    }
                )
    return report


def optimal_cost_deviations(task: Task, configs: Sequence[StubbornConfig]) -> list[tuple[str, Optional[int], Optional[int]]]:
    """(variant, expected, got) for every config whose pruned-space optimum
    differs from the unpruned one."""
    expected = optimal_cost(task)
    out = []
    for cfg in configs:
        got = optimal_cost(task, cfg)
        if got != expected:
            out.append((cfg.variant.value, expected, got))
    return out


# --------------------------------------------------------------------------
# random tasks


@dataclass(frozen=True)
class RandomTaskSpec:
    variable_count: int = 3
    max_domain: int = 3
    action_count: int = 6
    cost_mode: str = "unit"
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.variable_count <= 4:
            raise ValueError("variable_count must be in 1..4")
        if not 1 <= self.max_domain <= 3:
            raise ValueError("max_domain must be in 1..3")
        if not 0 <= self.action_count <= 8:
            raise ValueError("action_count must be in 0..8")
        if self.cost_mode not in ("unit", "random"):
            raise ValueError("cost_mode must be unit or random")


def generate_task(spec: RandomTaskSpec) -> Task:
    rng = random.Random(spec.seed)
    sizes = [rng.randint(min(2, spec.max_domain), spec.max_domain) for _ in range(spec.variable_count)]
    variables = tuple(Variable(i, f"v{i}", n) for i, n in enumerate(sizes))
    initial = tuple(rng.randrange(n) for n in sizes)
    var_ids = list(range(spec.variable_count))
    goal_vars = rng.sample(var_ids, rng.randint(1, spec.variable_count))
    goal = tuple((v, _other_value(rng, sizes[v], initial[v])) for v in goal_vars)
    actions = []
    for i in range(spec.action_count):
        pre = tuple((v, rng.randrange(sizes[v])) for v in var_ids if rng.random() < PRE_DENSITY)
        eff_vars = rng.sample(var_ids, rng.randint(1, min(2, spec.variable_count)))
        eff = tuple((v, rng.randrange(sizes[v])) for v in eff_vars)
        cost = 1 if spec.cost_mode == "unit" else rng.randint(1, 3)
        actions.append(Action(i, f"a{i}", pre, eff, cost))
    return Task(variables, tuple(actions), initial, goal, metric=spec.cost_mode != "unit")


def _other_value(rng: random.Random, size: int, avoid: int) -> int:
    if size == 1:
        return 0
    value = rng.randrange(size - 1)
    return value + 1 if value >= avoid else value


def random_x(task: Task, rng: random.Random) -> frozenset[int]:
    """Each action joins X independently with a probability drawn per call,
    so both sparse and dense sets come up."""
    p = rng.choice((0.0, 0.25, 0.5, 0.75, 1.0))
    return frozenset(a.id for a in task.actions if rng.random() < p)


# --------------------------------------------------------------------------
# shrinking and persistence of counterexamples


def _drop_action(task: Task, x: frozenset[int], victim: int) -> tuple[Task, frozenset[int]]:
    remap = {}
    actions = []
    for a in task.actions:
        if a.id == victim:
            continue
        remap[a.id] = len(actions)
        actions.append(Action(len(actions), a.name, a.pre, a.eff, a.cost))
    new_x = frozenset(remap[o] for o in x if o in remap)
    return Task(task.variables, tuple(actions), task.initial, task.goal, task.metric), new_x


def _candidates(task: Task, x: frozenset[int]):
    for a in task.actions:
        yield _drop_action(task, x, a.id)
    for a in task.actions:
        if a.id in x:
            yield task, x - {a.id}
    for i, fact in enumerate(task.goal):
        if len(task.goal) > 1:
            yield Task(task.variables, task.actions, task.initial, task.goal[:i] + task.goal[i + 1 :], task.metric), x
    for a in task.actions:
        for i in range(len(a.pre)):
            smaller = Action(a.id, a.name, a.pre[:i] + a.pre[i + 1 :], a.eff, a.cost)
            yield Task(task.variables, _swap(task.actions, smaller), task.initial, task.goal, task.metric), x
        for i in range(len(a.eff)):
            if len(a.eff) > 1:
                smaller = Action(a.id, a.name, a.pre, a.eff[:i] + a.eff[i + 1 :], a.cost)
                yield Task(task.variables, _swap(task.actions, smaller), task.initial, task.goal, task.metric), x
    for var in task.variables:
        top = var.domain_size - 1
        if top == 0 or _value_used(task, var.index, top):
            continue
        smaller = Variable(var.index, var.name, top)
        variables = task.variables[: var.index] + (smaller,) + task.variables[var.index + 1 :]
        yield Task(variables, task.actions, task.initial, task.goal, task.metric), x


def _swap(actions, new):
    return actions[: new.id] + (new,) + actions[new.id + 1 :]


def _value_used(task: Task, var: int, value: int) -> bool:
    if task.initial[var] == value or (var, value) in task.goal:
        return True
    return any((var, value) in a.pre or (var, value) in a.eff for a in task.actions)


def shrink(task: Task, x: frozenset[int], fails: Callable[[Task, frozenset[int]], bool]) -> tuple[Task, frozenset[int]]:
    """Greedy one-step reductions while `fails` keeps returning True."""
    progress = True
    while progress:
        progress = False
        for cand_task, cand_x in _candidates(task, x):
            try:
                still = fails(cand_task, cand_x)
            except (OracleIncomplete, ValueError):
                still = False
            if still:
                task, x = cand_task, cand_x
                progress = True
                break
    return task, x


def persist_counterexample(task: Task, report: SafetyReport, directory, name: str) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / f"{name}.sas").write_text(write_sas(task))
    path = directory / f"{name}.json"
    path.write_text(report.to_json())
    return path


# --------------------------------------------------------------------------
# sweeps over random tasks


@dataclass(frozen=True)
class RandomCase:
    seed: int
    task: Task
    x: frozenset[int]
    optimal: int


def random_cases(count: int, first_seed: int = 0, cost_mode: str = "unit") -> Iterator[RandomCase]:
    """The first `count` solvable random tasks from consecutive seeds, each
    with its own random X. Sizes lean towards the upper limits so that most
    tasks have several interleavings to prune."""
    seed = first_seed
    found = 0
    while found < count:
        rng = random.Random(seed)
        task = generate_task(RandomTaskSpec(rng.randint(3, 4), 3, rng.randint(5, 8), cost_mode, seed))
        x = random_x(task, rng)
        opt = optimal_cost(task)
        if opt is not None:
            found += 1
            yield RandomCase(seed, task, x, opt)
        seed += 1


def choice_rules(seed: int) -> list[tuple[str, str]]:
    """(goal_choice, nes_choice) pairs: the default rule and two adversarial ones."""
    return [("lowest", "lowest"), ("highest", "highest"), (f"random:{seed}", f"random:{seed + 1}")]


def sweep_case(case: RandomCase, variant: Variant, slack: int, x: Optional[frozenset[int]] = None) -> list[SafetyReport]:
    """Exhaustive safety reports of one case at bound opt + slack, one per choice rule."""
    x = case.x if x is None else x
    return [
        check_safety(
            case.task, x, variant, Bound.absolute(case.optimal + slack),
            exhaustive=True, goal_choice=goal, nes_choice=nes, task_id=f"seed{case.seed}",
        )
        for goal, nes in choice_rules(case.seed)
    ]
