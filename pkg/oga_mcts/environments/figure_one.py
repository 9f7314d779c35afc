"""Depth-1 deterministic tree with two near-tied action pairs."""

from __future__ import annotations

from typing import Any

import voluptuous as vol

from ..mdp import ActionId, MdpModel, Outcome, StateKey

ROOT = 0
LEAF = 1

DEFAULT_REWARDS: tuple[float, ...] = (0.5, 0.55, 1.0, 1.1)

SCHEMA = vol.Schema(
    {
        vol.Optional("rewards", default=list(DEFAULT_REWARDS)): vol.All(
            [vol.Coerce(float)], vol.Length(min=1)
        ),
    }
)


class FigureOneTree(MdpModel):
    """Root with one action per reward, every action ending in one leaf."""

    name = "figure1"

    def __init__(self, rewards: tuple[float, ...] = DEFAULT_REWARDS) -> None:
        self.rewards = tuple(rewards)

    def initial_state(self) -> StateKey:
        return ROOT

    def _actions(self, state: StateKey) -> list[ActionId]:
        return list(range(len(self.rewards)))

    def _outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        return [Outcome(LEAF, 1.0, self.rewards[action])]

    def _is_goal(self, state: StateKey) -> bool:
        return state == LEAF


def build(params: dict[str, Any]) -> FigureOneTree:
    return FigureOneTree(tuple(params["rewards"]))
