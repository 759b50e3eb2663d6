"""Exhaustive safety sweep of the pruning variants over random tasks.

    python3 scripts/safety_sweep.py --count 500 --slack 0 1 --out counterexamples

Prints one line per variant and bound, and writes a shrunk copy of every
failing task (output.sas plus a JSON report) to --out.
"""

import argparse
import time
from pathlib import Path

from potq.oracle import (
    check_safety,
    persist_counterexample,
    random_cases,
    shrink,
    sweep_case,
)
from potq.pruning import Variant
from potq.search import Bound, optimal_cost

VARIANTS = {v.value: v for v in (Variant.STUBBORN, Variant.POR_PLUS, Variant.POGSSS, Variant.NAIVE_UNSAFE)}


def shrink_and_save(case, x, variant, slack, report, out):
    goal, nes = report.config["goal_choice"], report.config["nes_choice"]

    def check(task, xs):
        opt = optimal_cost(task)
        if opt is None:
            raise ValueError("unsolvable")
        return check_safety(task, xs, variant, Bound.absolute(opt + slack), exhaustive=True,
                            goal_choice=goal, nes_choice=nes, task_id=f"seed{case.seed}-shrunk")

    task, xs = shrink(case.task, x, lambda t, xs: bool(check(t, xs).violations))
    return persist_counterexample(task, check(task, xs), out, f"{variant.value}-seed{case.seed}-slack{slack}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=500, help="number of solvable random tasks")
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--slack", type=int, nargs="+", default=[0, 1], help="bounds checked: optimal cost + slack")
    ap.add_argument("--variant", choices=sorted(VARIANTS), nargs="+", default=["stubborn", "por-plus", "pogsss"])
    ap.add_argument("--out", type=Path, default=None, help="directory for shrunk counterexamples")
    args = ap.parse_args()

    cases = list(random_cases(args.count, args.first_seed))
    print(f"{len(cases)} solvable tasks from seeds {cases[0].seed}..{cases[-1].seed}")
    for name in args.variant:
        variant = VARIANTS[name]
        for slack in args.slack:
            start = time.perf_counter()
            failing = []
            for case in cases:
                # without an order-important set stubborn sets answer the unordered question
                x = frozenset() if variant is Variant.STUBBORN else case.x
                bad = [r for r in sweep_case(case, variant, slack, x) if r.violations]
                if bad:
                    failing.append(case.seed)
                    if args.out is not None:
                        shrink_and_save(case, x, variant, slack, bad[0], args.out)
            print(f"{name:12s} slack={slack}  failing={len(failing):3d}  seeds={failing[:10]}"
                  f"  ({time.perf_counter() - start:.1f}s)")


if __name__ == "__main__":
    main()
