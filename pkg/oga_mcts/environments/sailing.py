"""Sailing to the far corner of a grid under a stochastically turning wind."""

from __future__ import annotations

from typing import Any

import voluptuous as vol

from ..const import MAX_GRID_SIZE
from ..mdp import ActionId, MdpModel, Outcome, StateKey
from ..validation import bounded_float, bounded_int, stochastic_row

# Compass headings, clockwise from north. The wind value is the heading it
# blows from, so sailing along heading == wind is sailing into the wind.
HEADINGS: tuple[tuple[int, int], ...] = (
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
)

# Cost by angle to the wind: up, cross, down, away. Angle 0 is illegal.
DEFAULT_ANGLE_COSTS: tuple[float, ...] = (4.0, 3.0, 2.0, 1.0)


def _wind_matrix(value: Any) -> list[list[float]]:
    rows = [stochastic_row(row) for row in value]
    if len(rows) != len(HEADINGS) or any(len(r) != len(HEADINGS) for r in rows):
        raise vol.Invalid("wind_change must be an 8x8 matrix")
    return rows


SCHEMA = vol.Schema(
    {
        vol.Required("size"): bounded_int(2, MAX_GRID_SIZE),
        vol.Required("wind_change"): _wind_matrix,
        vol.Optional("angle_costs", default=list(DEFAULT_ANGLE_COSTS)): vol.All(
            [bounded_float(0.0)], vol.Length(min=4, max=4)
        ),
        vol.Optional("initial_wind", default=0): bounded_int(0, 7),
    }
)


def wind_angle(heading: int, wind: int) -> int:
    """Return the angle between heading and wind in eighths of a turn (0..4)."""
    diff = abs(heading - wind) % len(HEADINGS)
    return min(diff, len(HEADINGS) - diff)


class SailingWind(MdpModel):
    """States are (x, y, wind); the goal is the corner (size-1, size-1)."""

    name = "sailing"

    def __init__(
        self,
        size: int,
        wind_change: list[list[float]],
        angle_costs: tuple[float, ...] = DEFAULT_ANGLE_COSTS,
        initial_wind: int = 0,
    ) -> None:
        self.size = size
        self.wind_change = wind_change
        self.angle_costs = angle_costs
        self.initial_wind = initial_wind
        self.goal = (size - 1, size - 1)

    def initial_state(self) -> StateKey:
        return (0, 0, self.initial_wind)

    def _headings(self, state: tuple[int, int, int]) -> list[int]:
        x, y, wind = state
        return [
            heading
            for heading, (dx, dy) in enumerate(HEADINGS)
            if heading != wind
            and 0 <= x + dx < self.size
            and 0 <= y + dy < self.size
        ]

    def _actions(self, state: StateKey) -> list[ActionId]:
        return list(range(len(self._headings(state))))  # type: ignore[arg-type]

    def _outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        x, y, wind = state  # type: ignore[misc]
        heading = self._headings(state)[action]  # type: ignore[arg-type]
        dx, dy = HEADINGS[heading]
        reward = -self.angle_costs[wind_angle(heading, wind) - 1]
        return [
            Outcome((x + dx, y + dy, new_wind), p, reward)
            for new_wind, p in enumerate(self.wind_change[wind])
            if p > 0.0
        ]

    def _is_goal(self, state: StateKey) -> bool:
        return state[:2] == self.goal  # type: ignore[index]


def build(params: dict[str, Any]) -> SailingWind:
    return SailingWind(
        params["size"],
        params["wind_change"],
        tuple(params["angle_costs"]),
        params["initial_wind"],
    )
