"""Hand-built reference tasks used by tests, scripts and docs."""

from .task import Action, Task, Variable


def cex_task() -> Task:
    """Three-action task on which adding X to a stubborn set is not enough.

    v0 in {0,1,2}, v1 in {0,1}; s0 = (0, 0); goal v0=2, v1=1;
    o1: v0 0->1, o2: v0 1->2, o3: v1 0->1, all unit cost. Plans:
    o1 o2 o3, o3 o1 o2, o1 o3 o2.
    """
    variables = (Variable(0, "v0", 3), Variable(1, "v1", 2))
    actions = (
        Action(0, "o1", ((0, 0),), ((0, 1),), 1),
        Action(1, "o2", ((0, 1),), ((0, 2),), 1),
        Action(2, "o3", ((1, 0),), ((1, 1),), 1),
    )
    return Task(variables, actions, (0, 0), ((0, 2), (1, 1)), metric=True)


def toy_indep(n: int) -> Task:
    """n binary variables, one unit-cost action per variable flipping it
    from 0 to 1, goal all ones. Every ordering of the n actions is a plan."""
    variables = tuple(Variable(i, f"v{i}", 2) for i in range(n))
    actions = tuple(Action(i, f"set{i}", ((i, 0),), ((i, 1),), 1) for i in range(n))
    return Task(variables, actions, (0,) * n, tuple((i, 1) for i in range(n)), metric=True)


def porplus_gap_task() -> Task:
    """Small task where extending a stubborn set by X loses a class.

    Goal seeds the stubborn set with {take} only; `prep` then `fix` have to
    run in that order and `fix` is order-important together with `take`.
    With X = {take, fix} the plan prep, fix, take has no equivalent path
    once `prep` is pruned at the initial state.
    """
    variables = (Variable(0, "done", 2), Variable(1, "mode", 3), Variable(2, "ready", 2))
    actions = (
        Action(0, "take", (), ((0, 1),), 1),
        Action(1, "fix", (), ((1, 1),), 1),
        Action(2, "prep", (), ((1, 2), (2, 1)), 1),
    )
    return Task(variables, actions, (0, 0, 0), ((0, 1), (1, 1), (2, 1)), metric=True)
