"""MCTS planning with on-the-go abstractions and intra-abstraction policies."""

from __future__ import annotations

from .abstraction import (
    AbstractionConfig,
    EpsilonOga,
    FixedPartition,
    PrunedOga,
    RandomOga,
    converge_abstraction,
    freeze_partition,
)
from .environments import build_environment
from .exceptions import (
    ConfigurationError,
    ContractViolationError,
    InvariantError,
    ModelInconsistencyError,
    OgaError,
    OracleInfeasibleError,
    ScoreInputError,
)
from .graph import SearchGraph
from .mdp import LayeredMdp, LayeredState, MdpModel, Outcome
from .oracle import ValueTable, optimal_actions, solve
from .policy import ExplorationConfig, IntraPolicy, SearchCounters
from .search import Planner, PlannerConfig, SearchResult

__version__ = "0.1.0"

__all__ = [
    "AbstractionConfig",
    "ConfigurationError",
    "ContractViolationError",
    "EpsilonOga",
    "ExplorationConfig",
    "FixedPartition",
    "IntraPolicy",
    "InvariantError",
    "LayeredMdp",
    "LayeredState",
    "MdpModel",
    "ModelInconsistencyError",
    "OgaError",
    "OracleInfeasibleError",
    "Outcome",
    "Planner",
    "PlannerConfig",
    "PrunedOga",
    "RandomOga",
    "ScoreInputError",
    "SearchCounters",
    "SearchGraph",
    "SearchResult",
    "ValueTable",
    "build_environment",
    "converge_abstraction",
    "freeze_partition",
    "optimal_actions",
    "solve",
]
