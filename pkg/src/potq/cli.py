"""Command-line front end.

    potq solve --task output.sas --x-regex "(load|unload).*" --pruning pogsss
    potq quotient --task output.sas --plans-dir found/ --x-regex "board.*"

`potq --task ...` (no subcommand) is shorthand for `potq solve --task ...`.

Exit codes: 0 ok, 2 bad input (parse errors, bad pattern, bad flags),
3 unsolvable, 4 a limit was hit, 5 a pruning safety violation was found.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .equivalence import (
    InvalidPattern,
    Plan,
    PlanFileError,
    quotient_filter,
    read_plans,
    select_actions,
    select_by_names,
    write_plans,
)
from .oracle import OracleIncomplete, check_safety
from .pruning import StubbornConfig, Variant
from .search import (
    Bound,
    LimitExceeded,
    SearchLimits,
    UnsolvableWithMultiplier,
    optimal_cost,
    solve_potq,
)
from .task import ParseError, Task, load_sas

log = logging.getLogger("potq")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNSOLVABLE = 3
EXIT_LIMITS = 4
EXIT_UNSAFE = 5


@dataclass
class RunConfig:
    task_path: str
    x_regex: Optional[str] = None
    x_explicit: Optional[list[str]] = None
    pruning: str = "none"
    quality_multiplier: Fraction = Fraction(1)
    absolute_bound: Optional[int] = None
    limits: SearchLimits = field(default_factory=SearchLimits)
    output_dir: str = "."
    report_format: str = "text"
    metrics: bool = False
    oracle_check: bool = False
    exhaustive_safety: bool = False
    goal_choice: str = "lowest"
    nes_choice: str = "lowest"

    def __post_init__(self):
        if self.x_regex is not None and self.x_explicit is not None:
            raise ValueError("--x-regex and --x-actions are mutually exclusive")

    @property
    def bound(self) -> Bound:
        if self.absolute_bound is not None:
            return Bound.absolute(self.absolute_bound)
        return Bound.multiplier(self.quality_multiplier)

    def echo(self) -> dict:
        d = asdict(self)
        d["quality_multiplier"] = str(self.quality_multiplier)
        d.pop("output_dir")
        d.pop("report_format")
        return d


@dataclass
class MetricsRecord:
    total_actions: int
    order_important_actions: int
    tq_size: int
    unordered_size: int
    potq_size: int
    normalized_potq: Optional[float]
    normalized_unordered: Optional[float]


def order_important_set(task: Task, config: RunConfig) -> frozenset[int]:
    if config.x_regex is not None:
        return select_actions(task, config.x_regex)
    if config.x_explicit is not None:
        return select_by_names(task, config.x_explicit)
    return frozenset()


def metrics(task: Task, x: frozenset[int], bound: Bound, limits: SearchLimits = SearchLimits()) -> MetricsRecord:
    """Solution sizes under the unordered, partially ordered and fully
    ordered relations, each from its own unpruned run on the same bound."""
    sizes = []
    for xs in (frozenset(), x, frozenset(range(len(task.actions)))):
        try:
            reps, stats = solve_potq(task, xs, bound, limits=limits)
        except LimitExceeded as e:
            raise OracleIncomplete(f"metrics enumeration hit a limit: {e}") from e
        if not stats.complete:
            raise OracleIncomplete("metrics enumeration truncated by the plan length limit")
        sizes.append(len(reps))
    unordered, potq, tq = sizes
    if not unordered <= potq <= tq:
        raise RuntimeError(f"solution sizes out of order: {unordered} <= {potq} <= {tq} fails")
    return MetricsRecord(
        total_actions=len(task.actions),
        order_important_actions=len(x),
        tq_size=tq,
        unordered_size=unordered,
        potq_size=potq,
        normalized_potq=potq / tq if tq else None,
        normalized_unordered=unordered / tq if tq else None,
    )


def run(config: RunConfig) -> tuple[int, dict]:
    """Execute one solve; returns (exit status, report). Writes plan files
    and report.json to the output directory."""
    report: dict = {"task": config.task_path, "config": config.echo(), "status": "ok"}
    try:
        task = load_sas(config.task_path)
        x = order_important_set(task, config)
        cfg = StubbornConfig(Variant(config.pruning), x, config.nes_choice, config.goal_choice)
        bound = config.bound
    except (ParseError, InvalidPattern, KeyError, ValueError, OSError) as e:
        return _fail(report, EXIT_PARSE, "input", e)
    report["x"] = sorted(task.actions[a].name for a in x)
    out_dir = Path(config.output_dir)

    try:
        plans, stats = solve_potq(task, x, bound, cfg, config.limits)
    except UnsolvableWithMultiplier as e:
        return _fail(report, EXIT_UNSOLVABLE, "unsolvable", e, out_dir)
    except LimitExceeded as e:
        reps = quotient_filter(e.plans, x)
        _record_plans(report, task, reps, e.stats, out_dir)
        return _fail(report, EXIT_LIMITS, "limits", e, out_dir)

    _record_plans(report, task, plans, stats, out_dir)
    status = EXIT_OK
    if not plans and config.absolute_bound is not None and optimal_cost(task) is None:
        report["status"] = "unsolvable"
        status = EXIT_UNSOLVABLE
    elif not stats.complete:
        report["status"] = "incomplete"
        report["error"] = f"plans longer than {stats.max_plan_length} actions were cut off"
        status = EXIT_LIMITS

    if config.metrics and status == EXIT_OK:
        try:
            report["metrics"] = asdict(metrics(task, x, bound, config.limits))
        except OracleIncomplete as e:
            return _fail(report, EXIT_LIMITS, "limits", e, out_dir)

    if config.oracle_check and status == EXIT_OK:
        try:
            safety = check_safety(
                task, x, cfg, bound, config.limits,
                exhaustive=config.exhaustive_safety, task_id=config.task_path,
            )
        except OracleIncomplete as e:
            return _fail(report, EXIT_LIMITS, "limits", e, out_dir)
        report["safety"] = safety.as_dict()
        if safety.violations:
            report["status"] = "unsafe"
            status = EXIT_UNSAFE

    _write_report(report, out_dir)
    return status, report


def _record_plans(report: dict, task: Task, plans: Sequence[Plan], stats, out_dir: Path) -> None:
    paths = write_plans(task, plans, out_dir)
    report["bound"] = stats.bound
    report["classes"] = len(plans)
    report["plans"] = [
        {"file": p.name, "cost": plan.cost, "length": len(plan), "actions": plan.names(task)}
        for p, plan in zip(paths, plans)
    ]
    report["stats"] = stats.as_dict(timing=False)
    report["timing"] = {"wall_time": stats.wall_time}


def _fail(report: dict, status: int, kind: str, err: Exception, out_dir: Optional[Path] = None) -> tuple[int, dict]:
    report["status"] = kind
    report["error"] = str(err)
    if out_dir is not None:
        _write_report(report, out_dir)
    return status, report


def _write_report(report: dict, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def quotient(task_path: str, plans_dir: str, x_regex=None, x_explicit=None, output_dir=None) -> tuple[int, dict]:
    report: dict = {"task": task_path, "plans_dir": plans_dir, "status": "ok"}
    try:
        task = load_sas(task_path)
        x = order_important_set(task, RunConfig(task_path, x_regex, x_explicit))
        plans = read_plans(task, plans_dir)
    except (ParseError, InvalidPattern, PlanFileError, KeyError, ValueError, OSError) as e:
        return _fail(report, EXIT_PARSE, "input", e)
    reps = quotient_filter(plans, x)
    report["x"] = sorted(task.actions[a].name for a in x)
    report["input_plans"] = len(plans)
    report["classes"] = len(reps)
    report["plans"] = [{"cost": p.cost, "actions": p.names(task)} for p in reps]
    if output_dir is not None:
        paths = write_plans(task, reps, output_dir)
        for entry, path in zip(report["plans"], paths):
            entry["file"] = path.name
    return EXIT_OK, report


# --------------------------------------------------------------------------
# argument parsing


def _x_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--x-regex", help="order-important actions: full-match regex on action names")
    group.add_argument("--x-actions", help="order-important actions: comma-separated action names")


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="potq", description="Partially ordered top-quality planning.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="enumerate plans up to a cost bound, one per equivalence class")
    s.add_argument("--task", required=True, help="Fast Downward output.sas (version 3)")
    _x_flags(s)
    s.add_argument("--pruning", default="none", choices=[v.value for v in Variant])
    bound = s.add_mutually_exclusive_group()
    bound.add_argument("--quality-multiplier", type=Fraction, default=Fraction(1))
    bound.add_argument("--absolute-bound", type=int)
    s.add_argument("--max-plans", type=_positive)
    s.add_argument("--max-length", type=_positive)
    s.add_argument("--node-budget", type=_positive)
    s.add_argument("--goal-choice", default="lowest", help="lowest, highest or random:<seed>")
    s.add_argument("--nes-choice", default="lowest", help="lowest, highest or random:<seed>")
    s.add_argument("--metrics", action="store_true", help="also report unordered/partially ordered/top-quality sizes")
    s.add_argument("--oracle-check", action="store_true", help="verify class coverage against brute force")
    s.add_argument("--exhaustive-safety", action="store_true", help="with --oracle-check: check from every reachable state")
    s.add_argument("--output-dir", default=".")
    s.add_argument("--report", choices=("text", "json"), default="text")

    q = sub.add_parser("quotient", help="reduce a directory of plan files to one plan per class")
    q.add_argument("--task", required=True)
    q.add_argument("--plans-dir", required=True)
    _x_flags(q)
    q.add_argument("--output-dir")
    q.add_argument("--report", choices=("text", "json"), default="text")
    return parser


def _split_names(text: Optional[str]) -> Optional[list[str]]:
    if text is None:
        return None
    return [n for n in text.split(",") if n.strip()]


def _print_text(report: dict) -> None:
    print(f"status: {report['status']}")
    if "error" in report:
        print(f"error: {report['error']}")
    if "x" in report:
        print(f"order-important actions: {len(report['x'])}")
    if "bound" in report:
        print(f"cost bound: {report['bound']}")
    if "classes" in report:
        print(f"classes: {report['classes']}")
    for i, plan in enumerate(report.get("plans", []), 1):
        print(f"  {plan.get('file', i)}: cost {plan['cost']}: {' '.join(plan['actions'])}")
    if "stats" in report:
        st = report["stats"]
        print(
            f"expansions {st['expansions']}, generated {st['generated']}, "
            f"pruned {st['pruned_successors']}, plans {st['plans_found']}"
        )
    if "metrics" in report:
        m = report["metrics"]
        print(
            f"metrics: tq={m['tq_size']} potq={m['potq_size']} unordered={m['unordered_size']} "
            f"captured={m['order_important_actions']}/{m['total_actions']}"
        )
    if "safety" in report:
        sr = report["safety"]
        print(f"safety: {sr['covered_class_count']}/{sr['full_class_count']} classes covered")
        for v in sr["violations"]:
            print(f"  uncovered class, witness: {' '.join(v['witness_names'])} (from state {v['state']})")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0].startswith("--") and argv[0] not in ("--help", "--verbose"):
        argv.insert(0, "solve")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "quotient":
        status, report = quotient(
            args.task, args.plans_dir, args.x_regex, _split_names(args.x_actions), args.output_dir
        )
    else:
        config = RunConfig(
            task_path=args.task,
            x_regex=args.x_regex,
            x_explicit=_split_names(args.x_actions),
            pruning=args.pruning,
            quality_multiplier=args.quality_multiplier,
            absolute_bound=args.absolute_bound,
            limits=SearchLimits(args.max_plans, args.max_length, args.node_budget),
            output_dir=args.output_dir,
            report_format=args.report,
            metrics=args.metrics,
            oracle_check=args.oracle_check,
            exhaustive_safety=args.exhaustive_safety,
            goal_choice=args.goal_choice,
            nes_choice=args.nes_choice,
        )
        status, report = run(config)

    if args.report == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        _print_text(report)
    return status


if __name__ == "__main__":
    sys.exit(main())
