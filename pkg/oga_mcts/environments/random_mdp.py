"""Seeded random layered MDPs and depth-1 trees for property tests."""

from __future__ import annotations

from typing import Any

import numpy as np
import voluptuous as vol

from ..mdp import ActionId, MdpModel, Outcome, StateKey
from ..validation import bounded_int

# Successor distributions by support size; few distinct values so that
# symmetric state-action pairs show up.
PROBABILITY_PATTERNS: dict[int, tuple[tuple[float, ...], ...]] = {
    1: ((1.0,),),
    2: ((0.5, 0.5), (0.25, 0.75)),
    3: ((0.5, 0.25, 0.25),),
}

DEFAULT_REWARD_LEVELS: tuple[float, ...] = (0.0, 1.0)

MDP_SCHEMA = vol.Schema(
    {
        vol.Optional("seed", default=0): bounded_int(0, 2**32 - 1),
        vol.Optional("depth", default=3): bounded_int(1, 8),
        vol.Optional("width", default=3): bounded_int(1, 8),
        vol.Optional("actions", default=2): bounded_int(1, 6),
        vol.Optional("branching", default=2): bounded_int(1, 3),
        vol.Optional("reward_levels", default=list(DEFAULT_REWARD_LEVELS)): vol.All(
            [vol.Coerce(float)], vol.Length(min=1)
        ),
    }
)

TREE_SCHEMA = vol.Schema(
    {
        vol.Optional("seed", default=0): bounded_int(0, 2**32 - 1),
        vol.Optional("actions", default=4): bounded_int(2, 16),
        vol.Optional("groups", default=2): bounded_int(1, 16),
    }
)


class RandomLayeredMdp(MdpModel):
    """States are (layer, index); layer ``depth`` is terminal."""

    name = "random_mdp"

    def __init__(
        self,
        seed: int = 0,
        depth: int = 3,
        width: int = 3,
        actions: int = 2,
        branching: int = 2,
        reward_levels: tuple[float, ...] = DEFAULT_REWARD_LEVELS,
    ) -> None:
        self.depth = depth
        self.width = width
        self.n_actions = actions
        rng = np.random.default_rng(seed)
        self._table: dict[tuple[int, int, int], list[Outcome]] = {}
        for layer in range(depth):
            for index in range(width):
                for action in range(actions):
                    reward = float(reward_levels[int(rng.integers(len(reward_levels)))])
                    support = int(rng.integers(1, min(branching, width) + 1))
                    successors = sorted(
                        int(s) for s in rng.choice(width, size=support, replace=False)
                    )
                    patterns = PROBABILITY_PATTERNS[support]
                    probs = patterns[int(rng.integers(len(patterns)))]
                    self._table[(layer, index, action)] = [
                        Outcome((layer + 1, succ), p, reward)
                        for succ, p in zip(successors, probs, strict=True)
                    ]

    def roots(self) -> list[StateKey]:
        return [(0, index) for index in range(self.width)]

    def initial_state(self) -> StateKey:
        return (0, 0)

    def _actions(self, state: StateKey) -> list[ActionId]:
        return list(range(self.n_actions))

    def _outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        layer, index = state  # type: ignore[misc]
        return self._table[(layer, index, action)]

    def _is_goal(self, state: StateKey) -> bool:
        return state[0] >= self.depth  # type: ignore[index]


class RandomTree(MdpModel):
    """Depth-1 deterministic tree with a random partition of its actions.

    ``action_groups`` is the same-parent partition used with
    ``FixedPartition``.
    """

    name = "random_tree"

    def __init__(self, seed: int = 0, actions: int = 4, groups: int = 2) -> None:
        rng = np.random.default_rng(seed)
        self.rewards = tuple(float(r) for r in rng.uniform(0.0, 1.0, size=actions))
        order = [int(a) for a in rng.permutation(actions)]
        chunks = np.array_split(order, min(groups, actions))
        self.action_groups = tuple(
            tuple(sorted(int(a) for a in chunk)) for chunk in chunks
        )

    def initial_state(self) -> StateKey:
        return 0

    def _actions(self, state: StateKey) -> list[ActionId]:
        return list(range(len(self.rewards)))

    def _outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        return [Outcome(1, 1.0, self.rewards[action])]

    def _is_goal(self, state: StateKey) -> bool:
        return state == 1


def build_mdp(params: dict[str, Any]) -> RandomLayeredMdp:
    return RandomLayeredMdp(
        params["seed"],
        params["depth"],
        params["width"],
        params["actions"],
        params["branching"],
        tuple(params["reward_levels"]),
    )


def build_tree(params: dict[str, Any]) -> RandomTree:
    return RandomTree(params["seed"], params["actions"], params["groups"])
