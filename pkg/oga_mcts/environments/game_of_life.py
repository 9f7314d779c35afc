"""Noisy Game of Life on a small bounded board with a sustain-cell action."""

from __future__ import annotations

from itertools import product
from typing import Any

import voluptuous as vol

from ..const import MAX_LIFE_SIZE
from ..mdp import ActionId, MdpModel, Outcome, RandomStream, StateKey
from ..validation import bounded_int, int_pair, probability

SCHEMA = vol.Schema(
    {
        vol.Required("size"): bounded_int(2, MAX_LIFE_SIZE),
        vol.Optional("noise", default=0.1): probability(),
        vol.Optional("alive", default=[]): [int_pair()],
    }
)


def _neighbours(x: int, y: int, size: int) -> list[int]:
    cells = []
    for dx, dy in product((-1, 0, 1), repeat=2):
        nx, ny = x + dx, y + dy
        if (dx, dy) != (0, 0) and 0 <= nx < size and 0 <= ny < size:
            cells.append(ny * size + nx)
    return cells


class GameOfLife(MdpModel):
    """Board states are tuples of 0/1 cells in row-major order.

    Action i < n*n keeps cell i alive next step; action n*n does nothing.
    Each other cell follows Conway's rule with probability 1 - noise and the
    opposite with probability noise. The reward is the live-cell count of the
    current board. Boards never terminate.
    """

    name = "game_of_life"

    def __init__(
        self,
        size: int,
        noise: float,
        alive: tuple[tuple[int, int], ...] = (),
    ) -> None:
        self.size = size
        self.noise = noise
        cells = [0] * (size * size)
        for x, y in alive:
            cells[y * size + x] = 1
        self._initial = tuple(cells)
        self._neighbours = [
            _neighbours(x, y, size) for y in range(size) for x in range(size)
        ]

    def initial_state(self) -> StateKey:
        return self._initial

    def _actions(self, state: StateKey) -> list[ActionId]:
        return list(range(self.size * self.size + 1))

    def _rule(self, board: tuple[int, ...]) -> list[int]:
        nxt = []
        for index, alive in enumerate(board):
            live = sum(board[n] for n in self._neighbours[index])
            nxt.append(1 if live == 3 or (alive and live == 2) else 0)
        return nxt

    def _cell_probs(
        self, expected: list[int], action: ActionId
    ) -> list[tuple[tuple[int, float], ...]]:
        """Per cell, the (value, probability) pairs it can take next step."""
        options = []
        for index, value in enumerate(expected):
            if index == action:
                options.append(((1, 1.0),))
            elif self.noise <= 0.0:
                options.append(((value, 1.0),))
            elif self.noise >= 1.0:
                options.append(((1 - value, 1.0),))
            else:
                options.append(((value, 1.0 - self.noise), (1 - value, self.noise)))
        return options

    def _outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        board: tuple[int, ...] = state  # type: ignore[assignment]
        reward = float(sum(board))
        options = self._cell_probs(self._rule(board), action)
        outcomes = []
        for combo in product(*options):
            p = 1.0
            for _, cell_p in combo:
                p *= cell_p
            outcomes.append(Outcome(tuple(v for v, _ in combo), p, reward))
        return outcomes

    def _sample(self, state: StateKey, action: ActionId, rng: RandomStream) -> Outcome:
        board: tuple[int, ...] = state  # type: ignore[assignment]
        reward = float(sum(board))
        options = self._cell_probs(self._rule(board), action)
        draws = rng.random(len(options))
        cells = []
        p = 1.0
        for draw, option in zip(draws, options, strict=True):
            if len(option) == 1 or draw >= option[1][1]:
                value, cell_p = option[0]
            else:
                value, cell_p = option[1]
            cells.append(value)
            p *= cell_p
        return Outcome(tuple(cells), p, reward)

    def _is_goal(self, state: StateKey) -> bool:
        return False


def build(params: dict[str, Any]) -> GameOfLife:
    size = params["size"]
    for x, y in params["alive"]:
        if not (0 <= x < size and 0 <= y < size):
            raise vol.Invalid(f"live cell ({x}, {y}) is off the board", path=["alive"])
    return GameOfLife(size, params["noise"], tuple(params["alive"]))
