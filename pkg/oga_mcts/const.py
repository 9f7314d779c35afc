"""Constants for the oga-mcts planner and harness."""

from __future__ import annotations

import math

# Tolerance for probability / reward comparisons.
ABS_TOL: float = 1e-9

# ----------------------------------------------------------------------
# Experiment config keys
# ----------------------------------------------------------------------

CONF_EXPERIMENT = "experiment"
CONF_GRID = "grid"
CONF_ENVIRONMENTS = "environments"

CONF_NAME = "name"
CONF_PARAMS = "params"
CONF_FIXTURE = "fixture"
CONF_HORIZON = "horizon"
CONF_EPISODES = "episodes"
CONF_SEED = "seed"
CONF_RECENCY = "recency"
CONF_WORKERS = "workers"
CONF_RECORD_TIMING = "record_timing"

CONF_VARIANTS = "variants"
CONF_ALPHA = "alpha"
CONF_EPS_A = "eps_a"
CONF_EPS_T = "eps_t"
CONF_P_ABS = "p_abs"
CONF_PG = "pg"
CONF_POLICY = "policy"
CONF_EXPLORATION_C = "exploration_c"
CONF_BUDGET = "budget"
CONF_ACTION_GROUPS = "action_groups"
CONF_LABEL = "label"

VARIANT_PRUNED = "pruned"
VARIANT_EPSILON = "epsilon"
VARIANT_RANDOM = "random"
VARIANT_FIXED = "fixed"
VARIANT_NONE = "none"
VARIANTS: tuple[str, ...] = (
    VARIANT_NONE,
    VARIANT_PRUNED,
    VARIANT_EPSILON,
    VARIANT_RANDOM,
    VARIANT_FIXED,
)

# Grid value selecting the environment's own eps_a list.
EPS_A_DOMAIN = "domain"

# ----------------------------------------------------------------------
# Defaults
# ----------------------------------------------------------------------

DEFAULT_HORIZON = 50
DEFAULT_EPISODES = 2000
DEFAULT_SEED = 0
DEFAULT_RECENCY = 3
DEFAULT_EXPLORATION_C = 2.0
DEFAULT_WORKERS = 1
DEFAULT_RECORD_TIMING = False
DEFAULT_ORACLE_NODE_BUDGET = 1_000_000
DEFAULT_CONVERGE_MAX_SWEEPS = 100

DEFAULT_ALPHAS: tuple[float, ...] = (0.0, 0.1, 0.2, 0.5, 0.75, 1.0)
DEFAULT_EPS_AS: tuple[float, ...] = (0.0, math.inf)
DEFAULT_EPS_TS: tuple[float, ...] = (0.0, 0.2, 0.4, 0.8, 1.2, 1.6)
DEFAULT_P_ABSES: tuple[float, ...] = (0.1, 0.2, 0.5, 1.0)
DEFAULT_PGS: tuple[bool, ...] = (False, True)
DEFAULT_BUDGETS: tuple[int, ...] = (100, 200, 500, 1000)
DEFAULT_DOMAIN_EPS_AS: tuple[float, ...] = (0.0, 1.0, 2.0, math.inf)

# Exploration constants for the parameter-optimized comparison.
OPTIMIZED_EXPLORATION_CS: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)

# Runtime benchmark setup.
BENCH_BUDGETS: tuple[int, ...] = (100, 2000)
BENCH_EPS_T = 0.8
DEFAULT_BENCH_STATES = 20

# z for a 99% confidence interval (one-sided normal quantile as reported).
CI_Z_99: float = 2.33

# ----------------------------------------------------------------------
# Bounds
# ----------------------------------------------------------------------

MIN_HORIZON = 1
MAX_HORIZON = 1000
MIN_EPISODES = 1
MAX_EPISODES = 1_000_000
MIN_RECENCY = 1
MAX_RECENCY = 1000
MIN_BUDGET = 1
MAX_BUDGET = 10_000_000
MIN_WORKERS = 1
MAX_WORKERS = 256
MAX_EPS_T = 2.0
MAX_GRID_SIZE = 64
MAX_LIFE_SIZE = 4

# ----------------------------------------------------------------------
# Results CSV
# ----------------------------------------------------------------------

CSV_COLUMNS: tuple[str, ...] = (
    "cell_id",
    "env",
    "variant",
    "alpha",
    "eps_a",
    "eps_t",
    "p_abs",
    "pg",
    "policy",
    "C",
    "budget",
    "seed",
    "return",
    "query_ratio",
    "decision_ms",
    "action_groups",
)

# Columns identifying an agent (everything but env, budget and per-episode data).
AGENT_COLUMNS: tuple[str, ...] = (
    "variant",
    "alpha",
    "eps_a",
    "eps_t",
    "p_abs",
    "pg",
    "policy",
    "C",
    "action_groups",
)
