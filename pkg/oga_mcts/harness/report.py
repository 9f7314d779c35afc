"""Tables computed from a results CSV."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path
from typing import IO

import numpy as np
import pandas as pd

from ..const import (
    AGENT_COLUMNS,
    CONF_ALPHA,
    CONF_EPS_T,
    CONF_P_ABS,
    CSV_COLUMNS,
    VARIANT_EPSILON,
    VARIANT_PRUNED,
    VARIANT_RANDOM,
)
from ..exceptions import ScoreInputError
from ..policy import IntraPolicy
from .scores import confidence_interval, pairings_score, relative_improvement_score

RETURN = "return"
QUERY_RATIO = "query_ratio"
ACTION_GROUPS = "action_groups"

# Grid parameter swept by the coarseness table and the variant it belongs to.
COARSENESS_PARAMETERS: dict[str, str] = {
    CONF_ALPHA: VARIANT_PRUNED,
    CONF_EPS_T: VARIANT_EPSILON,
    CONF_P_ABS: VARIANT_RANDOM,
}


def load_results(source: str | Path | IO[str]) -> pd.DataFrame:
    frame = pd.read_csv(
        source,
        dtype={"cell_id": str, "env": str, "policy": str, ACTION_GROUPS: str},
    )
    # An empty cell means no fixed groups; older results lack the column.
    if ACTION_GROUPS in frame.columns:
        frame[ACTION_GROUPS] = frame[ACTION_GROUPS].fillna("")
    else:
        frame[ACTION_GROUPS] = ""
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise ScoreInputError(f"results are missing columns: {', '.join(missing)}")
    return frame


def query_stats_report(
    frame: pd.DataFrame,
    group_by: Sequence[str] = ("eps_t", "pg"),
    variant: str | None = VARIANT_EPSILON,
) -> pd.DataFrame:
    """Mean per-episode query ratio per (env, *group_by), rounded to 2 decimals.

    Only rows of *variant* are averaged; with ``None`` every variant is kept
    and ``variant`` becomes a grouping key.
    """
    if variant is None:
        keys = list(dict.fromkeys(["env", "variant", *group_by]))
    else:
        frame = frame[frame["variant"] == variant]
        if frame.empty:
            raise ScoreInputError(f"no {variant} rows in the results")
        keys = ["env", *group_by]
    table = frame.groupby(keys, sort=True)[QUERY_RATIO].mean().round(2)
    return table.reset_index()


def format_query_stats(table: pd.DataFrame) -> str:
    value_keys = [c for c in table.columns if c not in ("env", QUERY_RATIO)]
    wide = table.pivot_table(
        index="env", columns=value_keys, values=QUERY_RATIO, aggfunc="first"
    )
    return wide.to_string(float_format=lambda v: f"{v:.2f}")


def performance_matrix(
    frame: pd.DataFrame,
    agent_columns: Sequence[str] = AGENT_COLUMNS,
    task_columns: Sequence[str] = ("env", "budget"),
) -> pd.DataFrame:
    """Mean return per agent (rows) and task (columns); incomplete agents dropped."""
    table = frame.pivot_table(
        index=list(agent_columns),
        columns=list(task_columns),
        values=RETURN,
        aggfunc="mean",
    )
    return table.dropna(axis=0, how="any")


def score_frame(perf: pd.DataFrame) -> pd.DataFrame:
    """Pairings and relative-improvement scores of every row of *perf*."""
    pairings = pairings_score(perf.to_numpy())
    relative = relative_improvement_score(perf.to_numpy())
    return pd.DataFrame(
        {"pairings": pairings.scores, "rel_improvement": relative.scores},
        index=perf.index,
    )


def _best_agent(perf: pd.DataFrame) -> object:
    if len(perf.index) >= 2 and len(perf.columns) >= 2:
        return score_frame(perf)["pairings"].idxmax()
    return perf.mean(axis=1).idxmax()


def policy_score_table(
    frame: pd.DataFrame, task_columns: Sequence[str] = ("env", "budget")
) -> pd.DataFrame:
    """Scores of the best parameter combination of each intra policy."""
    rows = []
    index = []
    for policy, sub in frame.groupby("policy", sort=True):
        perf = performance_matrix(sub, AGENT_COLUMNS, task_columns)
        if perf.empty:
            continue
        best = _best_agent(perf)
        rows.append(perf.loc[best])
        index.append(policy)
    if len(rows) < 2:
        raise ScoreInputError("need at least two intra policies with complete tasks")
    best_perf = pd.DataFrame(rows, index=pd.Index(index, name="policy")).dropna(
        axis=1, how="any"
    )
    return score_frame(best_perf)


def per_budget_score_tables(frame: pd.DataFrame) -> dict[int, pd.DataFrame]:
    return {
        int(budget): policy_score_table(sub, task_columns=("env",))
        for budget, sub in frame.groupby("budget", sort=True)
    }


def fixed_abstraction_ablation(frame: pd.DataFrame) -> pd.DataFrame:
    """Scores of the intra policies with every other parameter moved into the tasks."""
    task_columns = ["env", "budget", *[c for c in AGENT_COLUMNS if c != "policy"]]
    perf = frame.pivot_table(
        index="policy", columns=task_columns, values=RETURN, aggfunc="mean"
    ).dropna(axis=1, how="any")
    return score_frame(perf)


def coarseness_sweep(
    frame: pd.DataFrame,
    parameter: str,
    policies: Sequence[str] = (IntraPolicy.UCT.value, IntraPolicy.RANDOM.value),
) -> pd.DataFrame:
    """Best pairings score of each policy for each value of *parameter*.

    Scores are computed once over all agents of the results, then the best
    agent per (parameter value, policy) is reported.
    """
    try:
        variant = COARSENESS_PARAMETERS[parameter]
    except KeyError:
        raise ScoreInputError(
            f"coarseness sweep over {parameter!r} is not supported"
        ) from None
    scores = score_frame(performance_matrix(frame)).reset_index()
    scores = scores[
        (scores["variant"] == variant) & (scores["policy"].isin(list(policies)))
    ]
    if scores.empty:
        raise ScoreInputError(f"no {variant} agents of {', '.join(policies)} found")
    table = scores.groupby([parameter, "policy"])["pairings"].max()
    return table.unstack("policy")


def optimized_comparison(
    frame: pd.DataFrame,
    policies: Sequence[str] = (IntraPolicy.UCT.value, IntraPolicy.RANDOM.value),
) -> pd.DataFrame:
    """Per (env, budget) and policy, the best mean return with its 99% CI."""
    rows = []
    for (env, budget), sub in frame.groupby(["env", "budget"], sort=True):
        for policy in policies:
            candidates = sub[sub["policy"] == policy]
            if candidates.empty:
                continue
            means = candidates.groupby(list(AGENT_COLUMNS))[RETURN].mean()
            best = means.idxmax()
            mask = np.logical_and.reduce(
                [
                    candidates[col] == value
                    for col, value in zip(AGENT_COLUMNS, best, strict=True)
                ]
            )
            returns = candidates.loc[mask, RETURN]
            if len(returns) >= 2:
                mean, half_width = confidence_interval(returns)
            else:
                mean, half_width = float(returns.mean()), float("nan")
            rows.append(
                {
                    "env": env,
                    "budget": budget,
                    "policy": policy,
                    "mean": mean,
                    "ci99": half_width,
                    "episodes": len(returns),
                }
            )
    return pd.DataFrame(rows)
