"""Command-line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from functools import partial
from pathlib import Path
from typing import IO

import pandas as pd

from .const import (
    BENCH_BUDGETS,
    CONF_ALPHA,
    CONF_EPS_T,
    CONF_P_ABS,
    DEFAULT_BENCH_STATES,
    VARIANT_EPSILON,
    VARIANTS,
)
from .environments import build_environment
from .exceptions import OgaError, ScoreInputError
from .harness.bench import benchmark_overhead
from .harness.config import load_experiment, with_overrides
from .harness.report import (
    coarseness_sweep,
    fixed_abstraction_ablation,
    format_query_stats,
    load_results,
    optimized_comparison,
    per_budget_score_tables,
    policy_score_table,
    query_stats_report,
)
from .harness.runner import CellFailure, run_experiment, write_records
from .harness.trend import (
    FIGURE_ONE_GROUPS,
    TREND_BUDGETS,
    is_non_decreasing,
    random_tree_trend,
    visit_fraction_trend,
)
from .policy import IntraPolicy

_LOGGER = logging.getLogger(__name__)


def _int_list(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers: {value!r}"
        ) from None


def _emit(text: str, out: IO[str]) -> None:
    out.write(text.rstrip("\n") + "\n")


def _section(title: str, body: str, out: IO[str]) -> None:
    _emit(f"== {title}", out)
    _emit(body, out)
    _emit("", out)


def _table(frame: pd.DataFrame) -> str:
    return frame.to_string(float_format=lambda v: f"{v:.4f}")


def _cmd_run(args: argparse.Namespace, out: IO[str]) -> int:
    config = with_overrides(
        load_experiment(args.config),
        seed=args.seed,
        workers=args.workers,
        record_timing=args.timing or None,
    )
    failures: list[CellFailure] = []
    records = run_experiment(config, failures)
    write_records(records, out)
    if failures:
        _LOGGER.warning("Run finished with failures: episodes=%s", len(failures))
        return 1
    return 0


def _guarded(title: str, build: Callable[[], str], out: IO[str]) -> None:
    try:
        _section(title, build(), out)
    except ScoreInputError as err:
        _section(title, f"skipped: {err}", out)


def _cmd_scores(args: argparse.Namespace, out: IO[str]) -> int:
    frame = load_results(args.csv)
    _guarded("all budgets", lambda: _table(policy_score_table(frame)), out)
    _guarded(
        "per budget",
        lambda: "\n\n".join(
            f"budget {budget}\n{_table(table)}"
            for budget, table in per_budget_score_tables(frame).items()
        ),
        out,
    )
    _guarded(
        "fixed-abstraction ablation",
        lambda: _table(fixed_abstraction_ablation(frame)),
        out,
    )
    for parameter in (CONF_ALPHA, CONF_EPS_T, CONF_P_ABS):
        sweep = partial(coarseness_sweep, frame, parameter)
        _guarded(f"coarseness {parameter}", lambda s=sweep: _table(s()), out)
    _guarded("optimized", lambda: _table(optimized_comparison(frame)), out)
    return 0


def _cmd_stats(args: argparse.Namespace, out: IO[str]) -> int:
    frame = load_results(args.csv)
    group_by = tuple(g for g in args.group_by.split(",") if g)
    variant = None if args.variant == "all" else args.variant
    _emit(format_query_stats(query_stats_report(frame, group_by, variant)), out)
    return 0


def _cmd_figure1(args: argparse.Namespace, out: IO[str]) -> int:
    policy = IntraPolicy(args.policy)
    seed = args.seed or 0
    if args.random_trees:
        table = random_tree_trend(
            args.budgets, args.seeds, policy=policy, base_seed=seed
        )
    else:
        table = visit_fraction_trend(
            build_environment("figure1"),
            FIGURE_ONE_GROUPS,
            args.budgets,
            args.seeds,
            policy=policy,
            base_seed=seed,
        )
    _emit(_table(table), out)
    if is_non_decreasing(list(table["median_fraction"])):
        trend = "non-decreasing"
    else:
        trend = "not monotone"
    _emit(f"median share of the optimal action is {trend} in budget", out)
    return 0


def _cmd_bench(args: argparse.Namespace, out: IO[str]) -> int:
    config = load_experiment(args.config)
    result = benchmark_overhead(
        config.environments,
        budgets=args.budgets,
        states=args.states,
        seed=config.seed if args.seed is None else args.seed,
    )
    _section("decision ms", _table(result.timings), out)
    _section("median overhead uct/random", _table(result.overhead), out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oga-mcts",
        description="MCTS with on-the-go abstractions: experiments and reports.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("--out", type=Path, help="write output here, not stdout")
    parser.add_argument("--seed", type=int, help="override the base seed")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment grid and write CSV")
    run.add_argument("config", type=Path)
    run.add_argument("--workers", type=int, help="override the worker count")
    run.add_argument(
        "--timing", action="store_true", help="record decision times in the CSV"
    )
    run.set_defaults(handler=_cmd_run)

    scores = sub.add_parser("scores", help="score tables from a results CSV")
    scores.add_argument("csv", type=Path)
    scores.set_defaults(handler=_cmd_scores)

    stats = sub.add_parser("stats", help="query-ratio report from a results CSV")
    stats.add_argument("csv", type=Path)
    stats.add_argument("--group-by", default="eps_t,pg")
    stats.add_argument(
        "--variant",
        choices=[*VARIANTS, "all"],
        default=VARIANT_EPSILON,
        help='abstraction variant to report; "all" groups by variant',
    )
    stats.set_defaults(handler=_cmd_stats)

    figure1 = sub.add_parser(
        "figure1", help="optimal-action visit share per budget on the 4-action tree"
    )
    figure1.add_argument("--budgets", type=_int_list, default=list(TREND_BUDGETS))
    figure1.add_argument("--seeds", type=int, default=100)
    figure1.add_argument(
        "--policy",
        choices=[p.value for p in IntraPolicy],
        default=IntraPolicy.UCT.value,
    )
    figure1.add_argument(
        "--random-trees",
        action="store_true",
        help="use a random depth-1 tree per seed instead",
    )
    figure1.set_defaults(handler=_cmd_figure1)

    bench = sub.add_parser("bench", help="decision-time overhead of uct over random")
    bench.add_argument("config", type=Path)
    bench.add_argument("--budgets", type=_int_list, default=list(BENCH_BUDGETS))
    bench.add_argument("--states", type=int, default=DEFAULT_BENCH_STATES)
    bench.set_defaults(handler=_cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.out is None:
            return args.handler(args, sys.stdout)
        with args.out.open("w", encoding="utf-8", newline="") as out:
            return args.handler(args, out)
    except OgaError as err:
        print(f"oga-mcts: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
