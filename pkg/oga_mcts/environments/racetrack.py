"""Racetrack on an ASCII map with slipping accelerations and crash resets."""

from __future__ import annotations

import math
from typing import Any

import voluptuous as vol

from ..mdp import ActionId, MdpModel, Outcome, StateKey, merge_outcomes
from ..validation import bounded_int, probability

START = "S"
FINISH = "F"
WALL = "#"
TRACK = "."

ACCELERATIONS: tuple[tuple[int, int], ...] = tuple(
    (ax, ay) for ax in (-1, 0, 1) for ay in (-1, 0, 1)
)

STEP_REWARD = -1.0


def _track_map(value: Any) -> list[str]:
    rows = [str(row) for row in value]
    if not rows or len({len(row) for row in rows}) != 1:
        raise vol.Invalid("track rows must be non-empty and equally long")
    if set("".join(rows)) - {START, FINISH, WALL, TRACK}:
        raise vol.Invalid("track may only contain 'S', 'F', '#' and '.'")
    cells = "".join(rows)
    if START not in cells or FINISH not in cells:
        raise vol.Invalid("track needs at least one start and one finish cell")
    return rows


SCHEMA = vol.Schema(
    {
        vol.Required("track"): _track_map,
        vol.Optional("p_slip", default=0.1): probability(),
        vol.Optional("max_speed", default=2): bounded_int(1, 5),
    }
)


def _round(value: float) -> int:
    return math.floor(value + 0.5)


class Racetrack(MdpModel):
    """States are (x, y, vx, vy) with y indexing map rows from the top.

    Each of the nine accelerations is applied with probability 1 - p_slip and
    dropped with p_slip. Leaving the track resets the car to the first start
    cell at rest; crossing a finish cell ends the episode.
    """

    name = "racetrack"

    def __init__(self, track: list[str], p_slip: float, max_speed: int = 2) -> None:
        self.track = track
        self.p_slip = p_slip
        self.max_speed = max_speed
        self.starts = [
            (x, y)
            for y, row in enumerate(track)
            for x, cell in enumerate(row)
            if cell == START
        ]

    def _cell(self, x: int, y: int) -> str:
        if 0 <= y < len(self.track) and 0 <= x < len(self.track[0]):
            return self.track[y][x]
        return WALL

    def initial_state(self) -> StateKey:
        x, y = self.starts[0]
        return (x, y, 0, 0)

    def _actions(self, state: StateKey) -> list[ActionId]:
        return list(range(len(ACCELERATIONS)))

    def _clamp(self, value: int) -> int:
        return max(-self.max_speed, min(self.max_speed, value))

    def _drive(self, state: tuple[int, int, int, int], ax: int, ay: int) -> StateKey:
        x, y, vx, vy = state
        vx, vy = self._clamp(vx + ax), self._clamp(vy + ay)
        steps = max(abs(vx), abs(vy))
        for step in range(1, steps + 1):
            cx = _round(x + vx * step / steps)
            cy = _round(y + vy * step / steps)
            cell = self._cell(cx, cy)
            if cell == WALL:
                return self.initial_state()
            if cell == FINISH:
                return (cx, cy, 0, 0)
        return (x + vx, y + vy, vx, vy)

    def _outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        ax, ay = ACCELERATIONS[action]
        moved = self._drive(state, ax, ay)  # type: ignore[arg-type]
        if self.p_slip <= 0.0:
            return [Outcome(moved, 1.0, STEP_REWARD)]
        slipped = self._drive(state, 0, 0)  # type: ignore[arg-type]
        if self.p_slip >= 1.0:
            return [Outcome(slipped, 1.0, STEP_REWARD)]
        return merge_outcomes(
            [
                Outcome(moved, 1.0 - self.p_slip, STEP_REWARD),
                Outcome(slipped, self.p_slip, STEP_REWARD),
            ]
        )

    def _is_goal(self, state: StateKey) -> bool:
        return self._cell(state[0], state[1]) == FINISH  # type: ignore[index]


def build(params: dict[str, Any]) -> Racetrack:
    return Racetrack(params["track"], params["p_slip"], params["max_speed"])
