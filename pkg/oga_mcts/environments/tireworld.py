"""Triangle tireworld: drive to the goal, tires may go flat, spares are scattered."""

from __future__ import annotations

from typing import Any

import voluptuous as vol

from ..mdp import ActionId, MdpModel, Outcome, StateKey
from ..validation import bounded_int, probability

#     5
#    3 4
#   0 1 2
DEFAULT_ROADS: tuple[tuple[int, int], ...] = (
    (0, 1),
    (1, 2),
    (0, 3),
    (3, 5),
    (5, 4),
    (4, 2),
    (1, 3),
    (1, 4),
    (3, 4),
)
DEFAULT_SPARES: tuple[int, ...] = (3, 4, 5)

GOAL_REWARD = 1.0

SCHEMA = vol.Schema(
    {
        vol.Optional("roads", default=[list(r) for r in DEFAULT_ROADS]): [
            vol.ExactSequence([vol.Coerce(int), vol.Coerce(int)])
        ],
        vol.Optional("spares", default=list(DEFAULT_SPARES)): [vol.Coerce(int)],
        vol.Optional("start", default=0): bounded_int(0, 1000),
        vol.Optional("goal", default=2): bounded_int(0, 1000),
        vol.Optional("p_flat", default=0.5): probability(),
    }
)

# Action kinds in the order they are listed for a state.
MOVE = "move"
LOAD = "load"
CHANGE = "change"
NOOP = "noop"


class TriangleTireworld(MdpModel):
    """States are (location, carrying_spare, flat, spares_left).

    ``spares_left`` is a sorted tuple of locations still holding a spare.
    Driving may flatten the tire with p_flat; a flat tire must be changed
    with a carried spare before moving on. Arriving at the goal pays 1.
    A flat car without a spare can only wait.
    """

    name = "tireworld"

    def __init__(
        self,
        roads: tuple[tuple[int, int], ...],
        spares: tuple[int, ...],
        start: int,
        goal: int,
        p_flat: float,
    ) -> None:
        self.start = start
        self.goal = goal
        self.p_flat = p_flat
        self.spares = tuple(sorted(set(spares)))
        neighbours: dict[int, set[int]] = {}
        for a, b in roads:
            neighbours.setdefault(a, set()).add(b)
            neighbours.setdefault(b, set()).add(a)
        self.neighbours = {k: tuple(sorted(v)) for k, v in neighbours.items()}

    def initial_state(self) -> StateKey:
        return (self.start, False, False, self.spares)

    def _options(self, state: StateKey) -> list[tuple[str, int]]:
        location, carrying, flat, spares_left = state  # type: ignore[misc]
        options: list[tuple[str, int]] = []
        if not flat:
            options.extend((MOVE, n) for n in self.neighbours.get(location, ()))
        if location in spares_left and not carrying:
            options.append((LOAD, location))
        if flat and carrying:
            options.append((CHANGE, location))
        if not options:
            options.append((NOOP, location))
        return options

    def _actions(self, state: StateKey) -> list[ActionId]:
        return list(range(len(self._options(state))))

    def _outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        location, carrying, flat, spares_left = state  # type: ignore[misc]
        kind, target = self._options(state)[action]
        if kind == LOAD:
            left = tuple(s for s in spares_left if s != location)
            return [Outcome((location, True, flat, left), 1.0, 0.0)]
        if kind == CHANGE:
            return [Outcome((location, False, False, spares_left), 1.0, 0.0)]
        if kind == NOOP:
            return [Outcome(state, 1.0, 0.0)]
        reward = GOAL_REWARD if target == self.goal else 0.0
        ok = (target, carrying, False, spares_left)
        if self.p_flat <= 0.0:
            return [Outcome(ok, 1.0, reward)]
        punctured = (target, carrying, True, spares_left)
        if self.p_flat >= 1.0:
            return [Outcome(punctured, 1.0, reward)]
        return [
            Outcome(punctured, self.p_flat, reward),
            Outcome(ok, 1.0 - self.p_flat, reward),
        ]

    def _is_goal(self, state: StateKey) -> bool:
        return state[0] == self.goal  # type: ignore[index]


def build(params: dict[str, Any]) -> TriangleTireworld:
    roads = tuple((int(a), int(b)) for a, b in params["roads"])
    locations = {loc for road in roads for loc in road}
    for name in ("start", "goal"):
        if params[name] not in locations:
            raise vol.Invalid(f"{name} location is not on any road", path=[name])
    return TriangleTireworld(
        roads,
        tuple(params["spares"]),
        params["start"],
        params["goal"],
        params["p_flat"],
    )
