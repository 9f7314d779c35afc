"""Grid navigation where the robot may disappear on entering a cell."""

from __future__ import annotations

from typing import Any

import voluptuous as vol

from ..const import MAX_GRID_SIZE
from ..mdp import ActionId, MdpModel, Outcome, StateKey
from ..validation import bounded_int, int_pair, probability

# Where a disappeared robot is kept until the horizon.
SINK: tuple[int, int] = (-1, -1)

# North, east, south, west.
MOVES: tuple[tuple[int, int], ...] = ((0, 1), (1, 0), (0, -1), (-1, 0))

STEP_REWARD = -1.0


def _disappear_map(value: Any) -> float | list[list[float]]:
    if isinstance(value, list | tuple):
        return [[probability()(p) for p in row] for row in value]
    return probability()(value)


SCHEMA = vol.Schema(
    {
        vol.Required("width"): bounded_int(1, MAX_GRID_SIZE),
        vol.Required("height"): bounded_int(1, MAX_GRID_SIZE),
        vol.Optional("start", default=(0, 0)): int_pair(),
        vol.Optional("goal"): int_pair(),
        vol.Optional("disappear", default=0.0): _disappear_map,
    }
)


class NavigationGrid(MdpModel):
    """Deterministic moves; entering cell c loses the robot with p(c).

    ``disappear`` is indexed ``[y][x]``. Every step costs 1, the goal cell is
    terminal.
    """

    name = "navigation"

    def __init__(
        self,
        width: int,
        height: int,
        start: tuple[int, int],
        goal: tuple[int, int],
        disappear: list[list[float]],
    ) -> None:
        self.width = width
        self.height = height
        self.start = start
        self.goal = goal
        self.disappear = disappear

    def initial_state(self) -> StateKey:
        return self.start

    def _legal_moves(self, state: tuple[int, int]) -> list[tuple[int, int]]:
        x, y = state
        return [
            (x + dx, y + dy)
            for dx, dy in MOVES
            if 0 <= x + dx < self.width and 0 <= y + dy < self.height
        ]

    def _actions(self, state: StateKey) -> list[ActionId]:
        if state == SINK:
            return [0]
        return list(range(len(self._legal_moves(state))))  # type: ignore[arg-type]

    def _outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        if state == SINK:
            return [Outcome(SINK, 1.0, STEP_REWARD)]
        target = self._legal_moves(state)[action]  # type: ignore[arg-type]
        p_lost = 0.0 if target == self.goal else self.disappear[target[1]][target[0]]
        if p_lost <= 0.0:
            return [Outcome(target, 1.0, STEP_REWARD)]
        if p_lost >= 1.0:
            return [Outcome(SINK, 1.0, STEP_REWARD)]
        return [
            Outcome(target, 1.0 - p_lost, STEP_REWARD),
            Outcome(SINK, p_lost, STEP_REWARD),
        ]

    def _is_goal(self, state: StateKey) -> bool:
        return state == self.goal


def build(params: dict[str, Any]) -> NavigationGrid:
    width, height = params["width"], params["height"]
    goal = params.get("goal", (width - 1, height - 1))
    disappear = params["disappear"]
    if isinstance(disappear, float):
        grid = [[disappear] * width for _ in range(height)]
    else:
        grid = disappear
        if len(grid) != height or any(len(row) != width for row in grid):
            raise vol.Invalid(
                f"disappear grid must be {height} rows of {width} cells",
                path=["disappear"],
            )
    for name, (x, y) in (("start", params["start"]), ("goal", goal)):
        if not (0 <= x < width and 0 <= y < height):
            raise vol.Invalid(f"{name} cell ({x}, {y}) is off the grid", path=[name])
    return NavigationGrid(width, height, tuple(params["start"]), tuple(goal), grid)
