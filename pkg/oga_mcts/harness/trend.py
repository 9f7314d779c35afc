"""Root-visit share of the optimal action as the budget grows."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from time import perf_counter

import numpy as np
import pandas as pd

from ..abstraction import AbstractionConfig, FixedPartition
from ..const import DEFAULT_EXPLORATION_C
from ..environments.random_mdp import RandomTree
from ..mdp import ActionId, MdpModel
from ..oracle import optimal_actions, solve
from ..policy import ExplorationConfig, IntraPolicy
from ..search import Planner, PlannerConfig

_LOGGER = logging.getLogger(__name__)

FIGURE_ONE_GROUPS: tuple[tuple[ActionId, ...], ...] = ((0, 1), (2, 3))
TREND_BUDGETS: tuple[int, ...] = (1_000, 10_000, 100_000)


def root_visit_fraction(
    model: MdpModel,
    action_groups: Iterable[Iterable[ActionId]],
    policy: IntraPolicy,
    budget: int,
    seed: int,
    *,
    horizon: int = 1,
    c: float = DEFAULT_EXPLORATION_C,
) -> float:
    """Share of root visits spent on optimal actions after one search."""
    groups = tuple(tuple(g) for g in action_groups)
    config = PlannerConfig(
        abstraction=AbstractionConfig(variant=FixedPartition(groups)),
        policy=policy,
        exploration=ExplorationConfig(c),
        budget=budget,
    )
    state = model.initial_state()
    best = optimal_actions(solve(model, horizon), 0, state)
    result = Planner(model, config).search(
        state, horizon, np.random.default_rng(seed)
    )
    root = result.root
    if root.total_child_visits == 0:
        return 0.0
    optimal = sum(q.visits for q in root.children if q.action in best)
    return optimal / root.total_child_visits


def visit_fraction_trend(
    model: MdpModel,
    action_groups: Iterable[Iterable[ActionId]] = FIGURE_ONE_GROUPS,
    budgets: Sequence[int] = TREND_BUDGETS,
    seeds: int = 100,
    *,
    policy: IntraPolicy = IntraPolicy.UCT,
    horizon: int = 1,
    base_seed: int = 0,
) -> pd.DataFrame:
    """Median over *seeds* searches of the optimal root-visit share per budget."""
    groups = tuple(tuple(g) for g in action_groups)
    rows = []
    for budget in budgets:
        started = perf_counter()
        fractions = [
            root_visit_fraction(
                model, groups, policy, budget, base_seed + s, horizon=horizon
            )
            for s in range(seeds)
        ]
        median = float(np.median(fractions))
        _LOGGER.debug(
            "Trend budget finished: budget=%s, median=%.4f, duration_ms=%.1f",
            budget,
            median,
            (perf_counter() - started) * 1000,
        )
        rows.append(
            {
                "budget": budget,
                "median_fraction": median,
                "min_fraction": float(np.min(fractions)),
                "max_fraction": float(np.max(fractions)),
            }
        )
    return pd.DataFrame(rows)


def random_tree_trend(
    budgets: Sequence[int] = TREND_BUDGETS,
    seeds: int = 100,
    *,
    policy: IntraPolicy = IntraPolicy.UCT,
    actions: int = 4,
    groups: int = 2,
    base_seed: int = 0,
) -> pd.DataFrame:
    """Like ``visit_fraction_trend`` with a fresh random depth-1 tree per seed.

    Each tree is searched under its own same-parent action partition.
    """
    trees = [
        RandomTree(seed=base_seed + s, actions=actions, groups=groups)
        for s in range(seeds)
    ]
    rows = []
    for budget in budgets:
        fractions = [
            root_visit_fraction(
                tree, tree.action_groups, policy, budget, base_seed + s
            )
            for s, tree in enumerate(trees)
        ]
        rows.append(
            {"budget": budget, "median_fraction": float(np.median(fractions))}
        )
    return pd.DataFrame(rows)


def is_non_decreasing(values: Sequence[float], tol: float = 1e-9) -> bool:
    return all(b >= a - tol for a, b in zip(values, values[1:]))
