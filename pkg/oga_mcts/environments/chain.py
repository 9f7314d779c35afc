"""Five-state deterministic chain whose converged abstraction is known."""

from __future__ import annotations

from typing import Any

import voluptuous as vol

from ..mdp import ActionId, MdpModel, Outcome, StateKey

# 1 -> 3 -> 5 and 2 -> 4 -> 5, every reward 0.
SUCCESSORS: dict[int, int] = {1: 3, 2: 4, 3: 5, 4: 5}
TERMINAL = 5

SCHEMA = vol.Schema({vol.Optional("initial", default=1): vol.In([1, 2])})


class ChainFixture(MdpModel):
    name = "chain"

    def __init__(self, initial: int = 1) -> None:
        self.initial = initial

    def initial_state(self) -> StateKey:
        return self.initial

    def _actions(self, state: StateKey) -> list[ActionId]:
        return [0]

    def _outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        return [Outcome(SUCCESSORS[state], 1.0, 0.0)]  # type: ignore[index]

    def _is_goal(self, state: StateKey) -> bool:
        return state == TERMINAL


def build(params: dict[str, Any]) -> ChainFixture:
    return ChainFixture(params["initial"])
