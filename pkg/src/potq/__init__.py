"""Partially ordered top-quality planning on SAS+ tasks.

Enumerates all plans up to a cost bound and keeps one plan per class of the
relation "same action multiset and same order among the order-important
actions X", optionally pruning the search with stubborn sets adapted so
that no class is lost.
"""

from .equivalence import (
    EquivalenceKey,
    InvalidPattern,
    Plan,
    equiv_key,
    equivalent,
    quotient_filter,
    restrict,
    select_actions,
)
from .pruning import StubbornConfig, Variant, compute_stubborn, successors
from .search import Bound, LimitExceeded, SearchLimits, SearchStats, enumerate_plans, optimal_cost, solve_potq
from .task import Action, Task, Variable, apply, is_applicable, is_goal, load_sas, parse_sas, write_sas

__all__ = [
    "Action",
    "Bound",
    "EquivalenceKey",
    "InvalidPattern",
    "LimitExceeded",
    "Plan",
    "SearchLimits",
    "SearchStats",
    "StubbornConfig",
    "Task",
    "Variable",
    "Variant",
    "apply",
    "compute_stubborn",
    "enumerate_plans",
    "equiv_key",
    "equivalent",
    "is_applicable",
    "is_goal",
    "load_sas",
    "optimal_cost",
    "parse_sas",
    "quotient_filter",
    "restrict",
    "select_actions",
    "solve_potq",
    "successors",
    "write_sas",
]
