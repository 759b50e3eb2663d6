"""Solution sizes of the unordered, partially ordered and fully ordered
relations on the bundled tasks, plus pruning statistics per variant.

    python3 scripts/solution_sizes.py [--multiplier 1]
"""

import argparse
from fractions import Fraction
from pathlib import Path

from potq.benchmarks import cex_task, porplus_gap_task, toy_indep
from potq.cli import metrics
from potq.equivalence import select_actions
from potq.pruning import StubbornConfig, Variant
from potq.search import Bound, solve_potq
from potq.task import load_sas

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def tasks():
    yield "cex", cex_task(), "o2|o3"
    yield "gap", porplus_gap_task(), "take|fix"
    yield "toy-indep-5", toy_indep(5), "set[01]"
    yield "logistics-mini", load_sas(DATA / "logistics_mini.sas"), "(load|unload).*"


def main():
    ap = argparse.ArgumentParser(description="solution sizes and pruning statistics")
    ap.add_argument("--multiplier", type=Fraction, default=Fraction(1))
    args = ap.parse_args()
    bound = Bound.multiplier(args.multiplier)

    print(f"{'task':16s} {'|O|':>4s} {'|X|':>4s} {'tq':>5s} {'potq':>5s} {'unord':>5s} {'potq/tq':>8s}")
    for name, task, pattern in tasks():
        x = select_actions(task, pattern)
        m = metrics(task, x, bound)
        print(f"{name:16s} {m.total_actions:4d} {m.order_important_actions:4d} {m.tq_size:5d} "
              f"{m.potq_size:5d} {m.unordered_size:5d} {m.normalized_potq:8.3f}")

    print()
    print(f"{'task':16s} {'variant':12s} {'classes':>7s} {'plans':>6s} {'expanded':>8s} {'pruned':>7s}")
    for name, task, pattern in tasks():
        x = select_actions(task, pattern)
        for variant in (Variant.NONE, Variant.POR_PLUS, Variant.POGSSS):
            reps, stats = solve_potq(task, x, bound, StubbornConfig(variant, x))
            print(f"{name:16s} {variant.value:12s} {len(reps):7d} {stats.plans_found:6d} "
                  f"{stats.expansions:8d} {stats.pruned_successors:7d}")


if __name__ == "__main__":
    main()
