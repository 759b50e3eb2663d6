"""Plans, the partial-order equivalence between them, and selection of the
order-important action set."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import AbstractSet, Iterable, NamedTuple, Sequence

from .task import Task


class InvalidPattern(ValueError):
    pass


class PlanFileError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Plan:
    cost: int
    actions: tuple[int, ...]

    @classmethod
    def of(cls, task: Task, actions: Iterable[int]) -> "Plan":
        actions = tuple(actions)
        return cls(sum(task.actions[a].cost for a in actions), actions)

    def __len__(self) -> int:
        return len(self.actions)

    def names(self, task: Task) -> list[str]:
        return [task.actions[a].name for a in self.actions]


class EquivalenceKey(NamedTuple):
    multiset: tuple[tuple[int, int], ...]
    restricted: tuple[int, ...]


def _seq(plan) -> tuple[int, ...]:
    return plan.actions if isinstance(plan, Plan) else tuple(plan)


def restrict(plan, x: AbstractSet[int]) -> tuple[int, ...]:
    """Subsequence of the plan made of the occurrences of actions in `x`."""
    return tuple(a for a in _seq(plan) if a in x)


def equiv_key(plan, x: AbstractSet[int]) -> EquivalenceKey:
    seq = _seq(plan)
    return EquivalenceKey(tuple(sorted(Counter(seq).items())), restrict(seq, x))


def equivalent(p1, p2, x: AbstractSet[int]) -> bool:
    return equiv_key(p1, x) == equiv_key(p2, x)


def quotient_filter(plans: Sequence[Plan], x: AbstractSet[int]) -> list[Plan]:
    """Keep the first plan seen of every equivalence class, in input order."""
    seen = set()
    kept = []
    for plan in plans:
        key = equiv_key(plan, x)
        if key not in seen:
            seen.add(key)
            kept.append(plan)
    return kept


def select_actions(task: Task, pattern: str) -> frozenset[int]:
    """Ids of actions whose full name matches `pattern` (whole-string match)."""
    try:
        rx = re.compile(pattern)
    except re.error as e:
        raise InvalidPattern(f"invalid regular expression {pattern!r}: {e}") from None
    return frozenset(a.id for a in task.actions if rx.fullmatch(a.name))


def select_by_names(task: Task, names: Iterable[str]) -> frozenset[int]:
    return frozenset(task.action_id(n.strip().strip("()")) for n in names if n.strip())


# --------------------------------------------------------------------------
# Fast Downward plan files


def format_plan(task: Task, plan: Plan) -> str:
    lines = [f"({task.actions[a].name})" for a in plan.actions]
    lines.append(f"; cost = {plan.cost} ({'general' if task.metric else 'unit'} cost)")
    return "\n".join(lines) + "\n"


def parse_plan(task: Task, text: str) -> Plan:
    actions = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        if not (line.startswith("(") and line.endswith(")")):
            raise PlanFileError(f"line {lineno}: expected '(action name)', got {line!r}")
        try:
            actions.append(task.action_id(line[1:-1].strip()))
        except KeyError as e:
            raise PlanFileError(f"line {lineno}: {e.args[0]}") from None
    return Plan.of(task, actions)


def write_plans(task: Task, plans: Sequence[Plan], directory, stem: str = "sas_plan") -> list[Path]:
    """Write `stem.1`, `stem.2`, ...; numbered files left over from an
    earlier run in the same directory are removed first."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for old in directory.glob(f"{stem}.*"):
        if old.suffix[1:].isdigit():
            old.unlink()
    paths = []
    for i, plan in enumerate(plans, 1):
        path = directory / f"{stem}.{i}"
        path.write_text(format_plan(task, plan))
        paths.append(path)
    return paths


def _plan_file_order(path: Path):
    suffix = path.suffix.lstrip(".")
    return (0, int(suffix), path.name) if suffix.isdigit() else (1, 0, path.name)


def read_plans(task: Task, directory, stem: str = "sas_plan") -> list[Plan]:
    """Read `sas_plan`, `sas_plan.1`, `sas_plan.2`, ... from a directory,
    numbered files in numeric order."""
    directory = Path(directory)
    paths = [p for p in directory.iterdir() if p.is_file() and (p.name == stem or p.name.startswith(stem + "."))]
    return [parse_plan(task, p.read_text()) for p in sorted(paths, key=_plan_file_order)]
