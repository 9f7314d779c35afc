"""MDP contract implemented by every environment, plus the layered wrapper."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Hashable
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import ContractViolationError, ModelInconsistencyError
from .value_guard import is_normalized

StateKey = Hashable
"""Opaque hashable encoding of a domain state (environment-defined tuple)."""

ActionId = int
"""Index into a state's legal-action list."""

RandomStream = np.random.Generator
"""Random source; one per episode, never shared between threads."""

EpisodeReturn = float
"""Undiscounted (gamma = 1) sum of rewards along an episode."""


@dataclass(frozen=True, slots=True)
class Outcome:
    """One successor of a state-action pair with its exact model probability."""

    successor: StateKey
    probability: float
    reward: float


class LayeredState(NamedTuple):
    """A state paired with its depth in the layered MDP."""

    state: StateKey
    layer: int


class MdpModel(ABC):
    """Declarative finite MDP with known outcome probabilities.

    Subclasses implement the underscore hooks; the public operations add the
    contract checks. Models are immutable after construction and may be
    shared between threads.
    """

    name: str = "mdp"

    @abstractmethod
    def initial_state(self) -> StateKey:
        """Return the episode start state."""

    @abstractmethod
    def _actions(self, state: StateKey) -> list[ActionId]:
        """Return the legal actions of a non-terminal state."""

    @abstractmethod
    def _outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        """Return the full support of P(.|state, action)."""

    @abstractmethod
    def _is_goal(self, state: StateKey) -> bool:
        """Return True for terminal states of the ground MDP."""

    # ------------------------------------------------------------------
    # Public contract
    # ------------------------------------------------------------------

    def is_terminal(self, state: StateKey) -> bool:
        return self._is_goal(state)

    def enumerate_actions(self, state: StateKey) -> list[ActionId]:
        if self._is_goal(state):
            raise ContractViolationError(
                f"{self.name}: actions requested for terminal state {state!r}"
            )
        return self._actions(state)

    def check_action(self, state: StateKey, action: ActionId) -> None:
        """Raise ContractViolationError unless *action* is legal in *state*."""
        if action not in self.enumerate_actions(state):
            raise ContractViolationError(
                f"{self.name}: action {action} is illegal in state {state!r}"
            )

    def enumerate_outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        self.check_action(state, action)
        return self._outcomes(state, action)

    def sample_transition(
        self, state: StateKey, action: ActionId, rng: RandomStream
    ) -> Outcome:
        """Draw a successor with its stated probability.

        The default draws from ``enumerate_outcomes``; environments with large
        factored supports override ``_sample`` but must report exactly the
        enumerated probability of the sampled successor.
        """
        self.check_action(state, action)
        return self._sample(state, action, rng)

    def _sample(self, state: StateKey, action: ActionId, rng: RandomStream) -> Outcome:
        outcomes = self._outcomes(state, action)
        if len(outcomes) == 1:
            return outcomes[0]
        draw = rng.random()
        cumulative = 0.0
        for outcome in outcomes:
            cumulative += outcome.probability
            if draw < cumulative:
                return outcome
        # Rounding left the draw just above the cumulative sum.
        return outcomes[-1]

    def audit(self, state: StateKey) -> None:
        """Check normalization, reward and support invariants for one state.

        Raises ``ModelInconsistencyError`` on the first violation.
        """
        if self.is_terminal(state):
            return
        actions = self.enumerate_actions(state)
        if not actions or len(set(actions)) != len(actions):
            raise ModelInconsistencyError(
                f"{self.name}: empty or duplicate action list at {state!r}"
            )
        if actions != self.enumerate_actions(state):
            raise ModelInconsistencyError(
                f"{self.name}: unstable action ordering at {state!r}"
            )
        for action in actions:
            outcomes = self.enumerate_outcomes(state, action)
            if not is_normalized(o.probability for o in outcomes):
                raise ModelInconsistencyError(
                    f"{self.name}: outcomes of ({state!r}, {action}) do not sum to 1"
                )
            if len({o.successor for o in outcomes}) != len(outcomes):
                raise ModelInconsistencyError(
                    f"{self.name}: duplicate successors for ({state!r}, {action})"
                )
            if len({o.reward for o in outcomes}) != 1:
                raise ModelInconsistencyError(
                    f"{self.name}: reward of ({state!r}, {action}) depends on outcome"
                )
            if any(o.probability <= 0.0 for o in outcomes):
                raise ModelInconsistencyError(
                    f"{self.name}: non-positive probability at ({state!r}, {action})"
                )


def merge_outcomes(outcomes: list[Outcome]) -> list[Outcome]:
    """Merge outcomes sharing a successor, keeping first-seen order."""
    merged: dict[StateKey, Outcome] = {}
    for outcome in outcomes:
        previous = merged.get(outcome.successor)
        if previous is None:
            merged[outcome.successor] = outcome
        else:
            merged[outcome.successor] = Outcome(
                outcome.successor,
                previous.probability + outcome.probability,
                previous.reward,
            )
    return list(merged.values())


class LayeredMdp:
    """The layered MDP of a model: states carry their depth, depth h is terminal."""

    def __init__(self, model: MdpModel, horizon: int) -> None:
        self.model = model
        self.horizon = horizon

    def is_terminal(self, state: LayeredState) -> bool:
        return state.layer >= self.horizon or self.model.is_terminal(state.state)

    def enumerate_actions(self, state: LayeredState) -> list[ActionId]:
        if state.layer >= self.horizon:
            raise ContractViolationError(
                f"actions requested at horizon layer {state.layer}"
            )
        return self.model.enumerate_actions(state.state)

    def enumerate_outcomes(
        self, state: LayeredState, action: ActionId
    ) -> list[tuple[LayeredState, float, float]]:
        return [
            (LayeredState(o.successor, state.layer + 1), o.probability, o.reward)
            for o in self.model.enumerate_outcomes(state.state, action)
        ]

    def sample_transition(
        self, state: LayeredState, action: ActionId, rng: RandomStream
    ) -> tuple[LayeredState, float, float]:
        outcome = self.model.sample_transition(state.state, action, rng)
        return (
            LayeredState(outcome.successor, state.layer + 1),
            outcome.probability,
            outcome.reward,
        )
