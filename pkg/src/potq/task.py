"""SAS+ task representation, `output.sas` (version 3) reader/writer, and
state transition semantics."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

Fact = tuple[int, int]
State = tuple[int, ...]


class TaskError(Exception):
    pass


class ParseError(TaskError):
    """Base class for everything that can go wrong reading a task file."""


class MalformedFile(ParseError):
    pass


class UnsupportedFeature(ParseError):
    pass


class DomainViolation(ParseError):
    pass


class NotApplicable(TaskError):
    pass


def partial_assignment(pairs: Iterable[Fact]) -> tuple[Fact, ...]:
    """Normalise (var, value) pairs into a sorted tuple, rejecting a variable
    that is assigned twice with different values."""
    seen: dict[int, int] = {}
    for var, val in pairs:
        var, val = int(var), int(val)
        if var in seen and seen[var] != val:
            raise DomainViolation(f"variable {var} assigned both {seen[var]} and {val}")
        seen[var] = val
    return tuple(sorted(seen.items()))


@dataclass(frozen=True)
class Variable:
    index: int
    name: str
    domain_size: int
    value_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.domain_size < 1:
            raise DomainViolation(f"variable {self.name!r} has empty domain")
        if not self.value_names:
            names = tuple(f"Atom {self.name}={d}" for d in range(self.domain_size))
            object.__setattr__(self, "value_names", names)
        elif len(self.value_names) != self.domain_size:
            raise DomainViolation(f"variable {self.name!r}: value name count != domain size")


@dataclass(frozen=True)
class Action:
    id: int
    name: str
    pre: tuple[Fact, ...]
    eff: tuple[Fact, ...]
    cost: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pre", partial_assignment(self.pre))
        object.__setattr__(self, "eff", partial_assignment(self.eff))
        if not self.eff:
            raise DomainViolation(f"action {self.name!r} has an empty effect")
        if self.cost < 0:
            raise DomainViolation(f"action {self.name!r} has negative cost")

    @cached_property
    def pre_dict(self) -> dict[int, int]:
        return dict(self.pre)

    @cached_property
    def eff_dict(self) -> dict[int, int]:
        return dict(self.eff)


@dataclass(frozen=True)
class Task:
    variables: tuple[Variable, ...]
    actions: tuple[Action, ...]
    initial: State
    goal: tuple[Fact, ...]
    metric: bool = True
    _name_index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "initial", tuple(int(v) for v in self.initial))
        object.__setattr__(self, "goal", partial_assignment(self.goal))
        self.validate()

    def validate(self) -> None:
        """Check the structural invariants; raises DomainViolation/MalformedFile."""
        for i, var in enumerate(self.variables):
            if var.index != i:
                raise MalformedFile(f"variable {var.name!r} has index {var.index}, expected {i}")
        if len(self.initial) != len(self.variables):
            raise MalformedFile("initial state length differs from variable count")
        self._check_facts(enumerate(self.initial), "initial state")
        self._check_facts(self.goal, "goal")
        for i, act in enumerate(self.actions):
            if act.id != i:
                raise MalformedFile(f"action {act.name!r} has id {act.id}, expected {i}")
            self._check_facts(act.pre, f"precondition of {act.name!r}")
            self._check_facts(act.eff, f"effect of {act.name!r}")

    def _check_facts(self, facts: Iterable[Fact], what: str) -> None:
        n = len(self.variables)
        for var, val in facts:
            if not 0 <= var < n:
                raise DomainViolation(f"{what}: unknown variable {var}")
            if not 0 <= val < self.variables[var].domain_size:
                raise DomainViolation(
                    f"{what}: value {val} out of range for variable {self.variables[var].name!r}"
                )

    @property
    def action_ids(self) -> range:
        return range(len(self.actions))

    def action_id(self, name: str) -> int:
        if self._name_index is None:
            index: dict[str, int] = {}
            for act in self.actions:
                index.setdefault(act.name, act.id)
            object.__setattr__(self, "_name_index", index)
        try:
            return self._name_index[name]
        except KeyError:
            raise KeyError(f"no action named {name!r}") from None

    def with_initial(self, state: State) -> "Task":
        return Task(self.variables, self.actions, state, self.goal, self.metric)

    @cached_property
    def achievers(self) -> dict[Fact, tuple[int, ...]]:
        """Map each fact to the ids of actions whose effect sets it."""
        table: dict[Fact, list[int]] = {}
        for act in self.actions:
            for fact in act.eff:
                table.setdefault(fact, []).append(act.id)
        return {fact: tuple(ids) for fact, ids in table.items()}


def is_applicable(task: Task, state: State, action_id: int) -> bool:
    return all(state[v] == d for v, d in task.actions[action_id].pre)


def applicable_actions(task: Task, state: State) -> list[int]:
    return [a.id for a in task.actions if all(state[v] == d for v, d in a.pre)]


def apply(task: Task, state: State, action_id: int) -> State:
    act = task.actions[action_id]
    if not is_applicable(task, state, action_id):
        raise NotApplicable(f"{act.name!r} is not applicable in {state}")
    values = list(state)
    for v, d in act.eff:
        values[v] = d
    return tuple(values)


def is_goal(task: Task, state: State) -> bool:
    return all(state[v] == d for v, d in task.goal)


def replay(task: Task, actions: Sequence[int], state: State | None = None) -> tuple[State, int]:
    """Apply a sequence from `state` (default: initial); returns (end state, cost)."""
    s = task.initial if state is None else state
    cost = 0
    for a in actions:
        s = apply(task, s, a)
        cost += task.actions[a].cost
    return s, cost


# --------------------------------------------------------------------------
# output.sas reader


class _Lines:
    def __init__(self, text: str):
        self._lines = [ln.strip() for ln in text.splitlines()]
        self._pos = 0

    def next(self) -> str:
        while self._pos < len(self._lines):
            line = self._lines[self._pos]
            self._pos += 1
            if line:
                return line
        raise MalformedFile("unexpected end of file")

    def expect(self, token: str) -> None:
        line = self.next()
        if line != token:
            raise MalformedFile(f"line {self._pos}: expected {token!r}, got {line!r}")

    def ints(self, count: int | None = None) -> list[int]:
        line = self.next()
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError:
            raise MalformedFile(f"line {self._pos}: expected integers, got {line!r}") from None
        if count is not None and len(values) != count:
            raise MalformedFile(f"line {self._pos}: expected {count} integers, got {line!r}")
        return values

    def int(self) -> int:
        return self.ints(1)[0]

    def at_end(self) -> bool:
        return all(not ln for ln in self._lines[self._pos:])


def parse_sas(text: Union[str, bytes]) -> Task:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = _Lines(text)

    lines.expect("begin_version")
    version = lines.int()
    lines.expect("end_version")
    if version != 3:
        raise UnsupportedFeature(f"unsupported output.sas version {version}")

    lines.expect("begin_metric")
    metric_val = lines.int()
    lines.expect("end_metric")
    if metric_val not in (0, 1):
        raise MalformedFile(f"metric must be 0 or 1, got {metric_val}")
    metric = metric_val == 1

    variables = []
    for i in range(lines.int()):
        lines.expect("begin_variable")
        name = lines.next()
        axiom_layer = lines.int()
        if axiom_layer != -1:
            raise UnsupportedFeature(f"variable {name!r} is derived (axiom layer {axiom_layer})")
        size = lines.int()
        if size < 1:
            raise DomainViolation(f"variable {name!r} has domain size {size}")
        value_names = tuple(lines.next() for _ in range(size))
        lines.expect("end_variable")
        variables.append(Variable(i, name, size, value_names))

    for _ in range(lines.int()):
        lines.expect("begin_mutex_group")
        for _ in range(lines.int()):
            lines.ints(2)
        lines.expect("end_mutex_group")

    lines.expect("begin_state")
    initial = tuple(lines.int() for _ in variables)
    lines.expect("end_state")

    lines.expect("begin_goal")
    goal = [tuple(lines.ints(2)) for _ in range(lines.int())]
    lines.expect("end_goal")

    actions = []
    for op_id in range(lines.int()):
        lines.expect("begin_operator")
        name = lines.next()
        pre: list[Fact] = [tuple(lines.ints(2)) for _ in range(lines.int())]
        eff: list[Fact] = []
        for _ in range(lines.int()):
            row = lines.ints()
            if not row:
                raise MalformedFile(f"operator {name!r}: empty effect line")
            if row[0] != 0:
                raise UnsupportedFeature(f"operator {name!r} has a conditional effect")
            if len(row) != 4:
                raise MalformedFile(f"operator {name!r}: bad effect line {row}")
            _, var, old, new = row
            if old != -1:
                pre.append((var, old))
            eff.append((var, new))
        cost = lines.int()
        lines.expect("end_operator")
        if cost < 0:
            raise DomainViolation(f"operator {name!r} has negative cost")
        if not metric:
            cost = 1
        actions.append(Action(op_id, name, tuple(pre), tuple(eff), cost))

    n_axioms = lines.int()
    if n_axioms != 0:
        raise UnsupportedFeature(f"task has {n_axioms} axiom(s)")
    if not lines.at_end():
        raise MalformedFile("trailing content after axiom section")

    task = Task(tuple(variables), tuple(actions), initial, tuple(goal), metric)
    return task


def load_sas(path) -> Task:
    with open(path, "rb") as f:
        return parse_sas(f.read())


def write_sas(task: Task) -> str:
    """Serialise `task` back to `output.sas` version 3 text."""
    out = ["begin_version", "3", "end_version", "begin_metric", str(int(task.metric)), "end_metric"]
    out.append(str(len(task.variables)))
    for var in task.variables:
        out += ["begin_variable", var.name, "-1", str(var.domain_size), *var.value_names, "end_variable"]
    out.append("0")
    out += ["begin_state", *map(str, task.initial), "end_state"]
    out += ["begin_goal", str(len(task.goal)), *(f"{v} {d}" for v, d in task.goal), "end_goal"]
    out.append(str(len(task.actions)))
    for act in task.actions:
        pre = act.pre_dict
        prevail = [(v, d) for v, d in act.pre if v not in act.eff_dict]
        out += ["begin_operator", act.name, str(len(prevail))]
        out += [f"{v} {d}" for v, d in prevail]
        out.append(str(len(act.eff)))
        out += [f"0 {v} {pre.get(v, -1)} {d}" for v, d in act.eff]
        out += [str(act.cost), "end_operator"]
    out.append("0")
    return "\n".join(out) + "\n"
