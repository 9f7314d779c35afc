"""Decision-time overhead of one intra policy against another."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from time import perf_counter

import numpy as np
import pandas as pd

from ..abstraction import AbstractionConfig, EpsilonOga
from ..const import (
    BENCH_BUDGETS,
    BENCH_EPS_T,
    DEFAULT_BENCH_STATES,
    DEFAULT_EXPLORATION_C,
    DEFAULT_RECENCY,
)
from ..environments import cached_environment
from ..exceptions import ConfigurationError
from ..mdp import MdpModel, StateKey
from ..policy import ExplorationConfig, IntraPolicy
from ..search import Planner, PlannerConfig
from .config import EnvironmentSpec

_LOGGER = logging.getLogger(__name__)


def sample_states(
    model: MdpModel, horizon: int, count: int, rng: np.random.Generator
) -> list[tuple[StateKey, int]]:
    """Sample (state, steps left) pairs from uniform random walks.

    Each walk starts at the initial state and stops after a uniformly drawn
    number of steps, earlier if it reaches a terminal state.
    """
    if model.is_terminal(model.initial_state()):
        raise ConfigurationError(f"{model.name}: initial state is terminal")
    samples: list[tuple[StateKey, int]] = []
    while len(samples) < count:
        state = model.initial_state()
        length = int(rng.integers(horizon))
        steps = 0
        while steps < length:
            if model.is_terminal(state):
                break
            actions = model.enumerate_actions(state)
            action = actions[int(rng.integers(len(actions)))]
            state = model.sample_transition(state, action, rng).successor
            steps += 1
        if model.is_terminal(state):
            continue
        samples.append((state, horizon - steps))
    return samples


@dataclass(frozen=True, slots=True)
class BenchResult:
    timings: pd.DataFrame
    """Mean decision ms per (env, policy, budget)."""

    overhead: pd.DataFrame
    """Median relative overhead of the first policy over the second per budget."""


def benchmark_overhead(
    environments: Sequence[EnvironmentSpec],
    policies: tuple[IntraPolicy, IntraPolicy] = (IntraPolicy.UCT, IntraPolicy.RANDOM),
    budgets: Sequence[int] = BENCH_BUDGETS,
    *,
    states: int = DEFAULT_BENCH_STATES,
    seed: int = 0,
    eps_t: float = BENCH_EPS_T,
) -> BenchResult:
    """Time decisions on sampled states under (0, eps_t)-OGA.

    The first policy is compared against the second; the overhead of an
    environment is mean_ms(first) / mean_ms(second) - 1.
    """
    abstraction = AbstractionConfig(
        variant=EpsilonOga(0.0, eps_t), recency=DEFAULT_RECENCY
    )
    rows = []
    for env in environments:
        model = cached_environment(env.name, env.params)
        sampled = sample_states(
            model, env.horizon, states, np.random.default_rng(seed)
        )
        for budget in budgets:
            for policy in dict.fromkeys(policies):
                planner = Planner(
                    model,
                    PlannerConfig(
                        abstraction=abstraction,
                        policy=policy,
                        exploration=ExplorationConfig(DEFAULT_EXPLORATION_C),
                        budget=budget,
                    ),
                )
                rng = np.random.default_rng(seed)
                elapsed = 0.0
                for state, steps_left in sampled:
                    started = perf_counter()
                    planner.decide(state, steps_left, rng)
                    elapsed += perf_counter() - started
                mean_ms = elapsed * 1000 / len(sampled)
                _LOGGER.debug(
                    "Bench cell finished: env=%s, policy=%s, budget=%s, mean_ms=%.3f",
                    env.label,
                    policy.value,
                    budget,
                    mean_ms,
                )
                rows.append(
                    {
                        "env": env.label,
                        "policy": policy.value,
                        "budget": budget,
                        "decision_ms": mean_ms,
                    }
                )
    timings = pd.DataFrame(rows)
    first, second = policies[0].value, policies[1].value
    wide = timings.pivot_table(
        index=["budget", "env"], columns="policy", values="decision_ms"
    )
    per_env = (wide[first] / wide[second] - 1.0).rename("overhead")
    overhead = per_env.groupby(level="budget").median().reset_index()
    return BenchResult(timings=timings, overhead=overhead)
