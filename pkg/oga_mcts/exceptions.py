"""Exceptions raised by oga-mcts."""

from __future__ import annotations


class OgaError(Exception):
    """Base class for all planner and harness errors."""


class ContractViolationError(OgaError):
    """An environment was queried outside its contract.

    Raised for illegal actions and for action queries on terminal states.
    """


class ModelInconsistencyError(OgaError):
    """An environment reported different data for the same (s, a, s')."""


class InvariantError(OgaError):
    """An internal search-graph or abstraction invariant does not hold."""


class ConfigurationError(OgaError):
    """An environment or experiment configuration is invalid."""


class OracleInfeasibleError(OgaError):
    """The exact solver exceeded its node budget."""


class ScoreInputError(OgaError, ValueError):
    """Score or statistics input is degenerate (too few agents, tasks or samples)."""
