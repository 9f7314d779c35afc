"""Experiment harness: configs, runs, scores and reports."""

from __future__ import annotations

from .bench import BenchResult, benchmark_overhead, sample_states
from .config import (
    AgentSpec,
    Cell,
    EnvironmentSpec,
    ExperimentConfig,
    load_experiment,
    parse_experiment,
    with_overrides,
)
from .report import (
    coarseness_sweep,
    fixed_abstraction_ablation,
    load_results,
    optimized_comparison,
    per_budget_score_tables,
    policy_score_table,
    query_stats_report,
)
from .runner import (
    CellFailure,
    RunRecord,
    episode_seed,
    play_episode,
    run_episode,
    run_experiment,
    write_records,
)
from .scores import (
    ScoreMatrix,
    confidence_interval,
    pairings_score,
    relative_improvement_score,
)
from .trend import (
    random_tree_trend,
    root_visit_fraction,
    visit_fraction_trend,
)

__all__ = [
    "AgentSpec",
    "BenchResult",
    "Cell",
    "CellFailure",
    "EnvironmentSpec",
    "ExperimentConfig",
    "RunRecord",
    "ScoreMatrix",
    "benchmark_overhead",
    "coarseness_sweep",
    "confidence_interval",
    "episode_seed",
    "fixed_abstraction_ablation",
    "load_experiment",
    "load_results",
    "optimized_comparison",
    "pairings_score",
    "parse_experiment",
    "per_budget_score_tables",
    "play_episode",
    "policy_score_table",
    "query_stats_report",
    "random_tree_trend",
    "relative_improvement_score",
    "root_visit_fraction",
    "run_episode",
    "run_experiment",
    "sample_states",
    "visit_fraction_trend",
    "with_overrides",
    "write_records",
]
