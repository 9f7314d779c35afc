"""Experiment configuration: TOML loading, validation and grid expansion."""

from __future__ import annotations

import itertools
import json
import tomllib
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import voluptuous as vol

from ..abstraction import (
    AbstractionConfig,
    EpsilonOga,
    FixedPartition,
    PrunedOga,
    RandomOga,
)
from ..const import (
    CONF_ACTION_GROUPS,
    CONF_ALPHA,
    CONF_BUDGET,
    CONF_ENVIRONMENTS,
    CONF_EPISODES,
    CONF_EPS_A,
    CONF_EPS_T,
    CONF_EXPERIMENT,
    CONF_EXPLORATION_C,
    CONF_GRID,
    CONF_HORIZON,
    CONF_LABEL,
    CONF_NAME,
    CONF_P_ABS,
    CONF_PARAMS,
    CONF_PG,
    CONF_POLICY,
    CONF_RECENCY,
    CONF_RECORD_TIMING,
    CONF_SEED,
    CONF_VARIANTS,
    CONF_WORKERS,
    DEFAULT_ALPHAS,
    DEFAULT_BUDGETS,
    DEFAULT_EPISODES,
    DEFAULT_EPS_AS,
    DEFAULT_EPS_TS,
    DEFAULT_EXPLORATION_C,
    DEFAULT_HORIZON,
    DEFAULT_P_ABSES,
    DEFAULT_PGS,
    DEFAULT_RECENCY,
    DEFAULT_RECORD_TIMING,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
    EPS_A_DOMAIN,
    MAX_BUDGET,
    MAX_EPISODES,
    MAX_EPS_T,
    MAX_HORIZON,
    MAX_RECENCY,
    MAX_WORKERS,
    MIN_BUDGET,
    MIN_EPISODES,
    MIN_HORIZON,
    MIN_RECENCY,
    MIN_WORKERS,
    VARIANT_EPSILON,
    VARIANT_FIXED,
    VARIANT_NONE,
    VARIANT_PRUNED,
    VARIANT_RANDOM,
    VARIANTS,
)
from ..environments import environment_eps_a_grid
from ..exceptions import ConfigurationError
from ..policy import ExplorationConfig, IntraPolicy
from ..search import PlannerConfig
from ..validation import bounded_float, bounded_int, probability, validate


def _eps_a(value: Any) -> float | str:
    if value == EPS_A_DOMAIN:
        return EPS_A_DOMAIN
    return bounded_float(0.0)(value)


def _non_empty(validator: Any) -> vol.All:
    return vol.All([validator], vol.Length(min=1))


EXPERIMENT_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_EPISODES, default=DEFAULT_EPISODES): bounded_int(
            MIN_EPISODES, MAX_EPISODES
        ),
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): bounded_int(0, 2**63 - 1),
        vol.Optional(CONF_RECENCY, default=DEFAULT_RECENCY): bounded_int(
            MIN_RECENCY, MAX_RECENCY
        ),
        vol.Optional(CONF_WORKERS, default=DEFAULT_WORKERS): bounded_int(
            MIN_WORKERS, MAX_WORKERS
        ),
        vol.Optional(CONF_RECORD_TIMING, default=DEFAULT_RECORD_TIMING): bool,
    }
)

GRID_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_VARIANTS, default=[VARIANT_PRUNED]): _non_empty(
            vol.In(VARIANTS)
        ),
        vol.Optional(CONF_ALPHA, default=list(DEFAULT_ALPHAS)): _non_empty(
            probability()
        ),
        vol.Optional(CONF_EPS_A, default=list(DEFAULT_EPS_AS)): _non_empty(_eps_a),
        vol.Optional(CONF_EPS_T, default=list(DEFAULT_EPS_TS)): _non_empty(
            bounded_float(0.0, MAX_EPS_T)
        ),
        vol.Optional(CONF_P_ABS, default=list(DEFAULT_P_ABSES)): _non_empty(
            probability()
        ),
        vol.Optional(CONF_PG, default=list(DEFAULT_PGS)): _non_empty(bool),
        vol.Optional(CONF_POLICY, default=[p.value for p in IntraPolicy]): _non_empty(
            vol.All(vol.In([p.value for p in IntraPolicy]), IntraPolicy)
        ),
        vol.Optional(
            CONF_EXPLORATION_C, default=[DEFAULT_EXPLORATION_C]
        ): _non_empty(bounded_float(1e-12)),
        vol.Optional(CONF_BUDGET, default=list(DEFAULT_BUDGETS)): _non_empty(
            bounded_int(MIN_BUDGET, MAX_BUDGET)
        ),
        vol.Optional(CONF_ACTION_GROUPS, default=[[]]): _non_empty(
            [[vol.Coerce(int)]]
        ),
    }
)

ENVIRONMENT_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_NAME): str,
        vol.Optional(CONF_LABEL): str,
        vol.Optional(CONF_HORIZON, default=DEFAULT_HORIZON): bounded_int(
            MIN_HORIZON, MAX_HORIZON
        ),
        vol.Optional(CONF_PARAMS, default={}): dict,
    }
)


def _num(value: float) -> str:
    return format(value, "g")


@dataclass(frozen=True, kw_only=True)
class EnvironmentSpec:
    name: str
    label: str
    horizon: int
    params_json: str = "{}"

    @property
    def params(self) -> dict[str, Any]:
        return json.loads(self.params_json)


@dataclass(frozen=True, kw_only=True)
class AgentSpec:
    """One parameter combination of the agent grid."""

    variant: str
    alpha: float = 0.0
    eps_a: float = 0.0
    eps_t: float = 0.0
    p_abs: float = 0.0
    pg: bool = False
    policy: IntraPolicy = IntraPolicy.UCT
    c: float = DEFAULT_EXPLORATION_C
    action_groups: tuple[tuple[int, ...], ...] = ()

    def abstraction(self, recency: int = DEFAULT_RECENCY) -> AbstractionConfig | None:
        if self.variant == VARIANT_NONE:
            return None
        variant: PrunedOga | EpsilonOga | RandomOga | FixedPartition
        if self.variant == VARIANT_PRUNED:
            variant = PrunedOga(self.alpha)
        elif self.variant == VARIANT_EPSILON:
            variant = EpsilonOga(self.eps_a, self.eps_t)
        elif self.variant == VARIANT_RANDOM:
            variant = RandomOga(self.p_abs)
        else:
            variant = FixedPartition(self.action_groups)
        return AbstractionConfig(variant=variant, pg=self.pg, recency=recency)

    def planner(self, budget: int, recency: int = DEFAULT_RECENCY) -> PlannerConfig:
        return PlannerConfig(
            abstraction=self.abstraction(recency),
            policy=self.policy,
            exploration=ExplorationConfig(self.c),
            budget=budget,
        )

    @property
    def groups_label(self) -> str:
        """Action groups as CSV text, e.g. ``0 1;2 3``."""
        return ";".join(" ".join(map(str, g)) for g in self.action_groups)

    @property
    def key(self) -> str:
        groups = ";".join(",".join(map(str, g)) for g in self.action_groups)
        return (
            f"{self.variant}|a={_num(self.alpha)}|ea={_num(self.eps_a)}"
            f"|et={_num(self.eps_t)}|p={_num(self.p_abs)}|pg={int(self.pg)}"
            f"|{self.policy.value}|C={_num(self.c)}|g={groups}"
        )


@dataclass(frozen=True, kw_only=True)
class Cell:
    """One (environment, agent, budget) combination of the experiment."""

    cell_id: str
    env: EnvironmentSpec
    agent: AgentSpec
    budget: int

    @property
    def key(self) -> str:
        """Stable description used to derive per-episode seeds."""
        return f"{self.env.label}|{self.agent.key}|B={self.budget}"


@dataclass(frozen=True, kw_only=True)
class ExperimentConfig:
    environments: tuple[EnvironmentSpec, ...]
    grid: Mapping[str, Any] = field(compare=False)
    episodes: int = DEFAULT_EPISODES
    seed: int = DEFAULT_SEED
    recency: int = DEFAULT_RECENCY
    workers: int = DEFAULT_WORKERS
    record_timing: bool = DEFAULT_RECORD_TIMING

    def agents(self, env: EnvironmentSpec) -> list[AgentSpec]:
        return expand_agents(self.grid, env.name)

    def cells(self) -> list[Cell]:
        """Enumerate every cell in canonical order."""
        cells: list[Cell] = []
        for env in self.environments:
            for agent in self.agents(env):
                for budget in self.grid[CONF_BUDGET]:
                    cells.append(
                        Cell(
                            cell_id=f"c{len(cells):05d}",
                            env=env,
                            agent=agent,
                            budget=budget,
                        )
                    )
        return cells


def expand_agents(grid: Mapping[str, Any], env_name: str) -> list[AgentSpec]:
    """Expand the grid axes relevant to each variant into agents."""
    eps_as: list[float] = []
    for value in grid[CONF_EPS_A]:
        if value == EPS_A_DOMAIN:
            eps_as.extend(environment_eps_a_grid(env_name))
        else:
            eps_as.append(value)
    eps_as = list(dict.fromkeys(eps_as))
    policies = grid[CONF_POLICY]
    cs = grid[CONF_EXPLORATION_C]
    agents: list[AgentSpec] = []
    for variant in grid[CONF_VARIANTS]:
        if variant == VARIANT_NONE:
            combos = [{}]
        elif variant == VARIANT_PRUNED:
            combos = [
                {"alpha": alpha, "pg": pg}
                for alpha, pg in itertools.product(grid[CONF_ALPHA], grid[CONF_PG])
            ]
        elif variant == VARIANT_EPSILON:
            combos = [
                {"eps_a": eps_a, "eps_t": eps_t, "pg": pg}
                for eps_a, eps_t, pg in itertools.product(
                    eps_as, grid[CONF_EPS_T], grid[CONF_PG]
                )
            ]
        elif variant == VARIANT_RANDOM:
            combos = [{"p_abs": p_abs} for p_abs in grid[CONF_P_ABS]]
        else:
            combos = [
                {"action_groups": tuple(tuple(g) for g in groups)}
                for groups in grid[CONF_ACTION_GROUPS]
            ]
        for combo, policy, c in itertools.product(combos, policies, cs):
            agents.append(AgentSpec(variant=variant, policy=policy, c=c, **combo))
    return agents


def parse_experiment(data: Mapping[str, Any]) -> ExperimentConfig:
    """Validate a decoded config document and build the experiment."""
    experiment = validate(
        EXPERIMENT_SCHEMA, data.get(CONF_EXPERIMENT, {}), CONF_EXPERIMENT
    )
    grid = validate(GRID_SCHEMA, data.get(CONF_GRID, {}), CONF_GRID)
    raw_envs = data.get(CONF_ENVIRONMENTS, [])
    if not raw_envs:
        raise ConfigurationError("at least one [[environments]] entry is required")
    envs: list[EnvironmentSpec] = []
    for index, raw in enumerate(raw_envs):
        entry = validate(ENVIRONMENT_SCHEMA, raw, f"environments[{index}]")
        params = entry[CONF_PARAMS]
        label = entry.get(CONF_LABEL) or entry[CONF_NAME]
        if label in {e.label for e in envs}:
            raise ConfigurationError(
                f"environments[{index}]: duplicate label {label!r}, set 'label'"
            )
        envs.append(
            EnvironmentSpec(
                name=entry[CONF_NAME],
                label=label,
                horizon=entry[CONF_HORIZON],
                params_json=json.dumps(params, sort_keys=True),
            )
        )
    for env in envs:
        # Unknown names fail here rather than inside a worker.
        environment_eps_a_grid(env.name)
    return ExperimentConfig(
        environments=tuple(envs),
        grid=grid,
        episodes=experiment[CONF_EPISODES],
        seed=experiment[CONF_SEED],
        recency=experiment[CONF_RECENCY],
        workers=experiment[CONF_WORKERS],
        record_timing=experiment[CONF_RECORD_TIMING],
    )


def load_experiment(path: str | Path) -> ExperimentConfig:
    try:
        with Path(path).open("rb") as f:
            data = tomllib.load(f)
    except OSError as err:
        raise ConfigurationError(f"cannot read config {path}: {err}") from err
    except tomllib.TOMLDecodeError as err:
        raise ConfigurationError(f"invalid TOML in {path}: {err}") from err
    return parse_experiment(data)


def _sanitize_workers(value: int | None, default: int) -> int:
    """Clamp a CLI worker override into the supported range."""
    if value is None:
        return default
    return max(MIN_WORKERS, min(MAX_WORKERS, int(value)))


def with_overrides(
    config: ExperimentConfig,
    *,
    seed: int | None = None,
    workers: int | None = None,
    record_timing: bool | None = None,
) -> ExperimentConfig:
    return ExperimentConfig(
        environments=config.environments,
        grid=config.grid,
        episodes=config.episodes,
        seed=config.seed if seed is None else seed,
        recency=config.recency,
        workers=_sanitize_workers(workers, config.workers),
        record_timing=(
            config.record_timing if record_timing is None else record_timing
        ),
    )
