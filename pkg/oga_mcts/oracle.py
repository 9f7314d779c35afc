"""Exact backward-induction solver over the reachable layered MDP."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from time import perf_counter

from .const import ABS_TOL, DEFAULT_ORACLE_NODE_BUDGET
from .exceptions import OracleInfeasibleError
from .mdp import ActionId, LayeredMdp, LayeredState, MdpModel, StateKey

_LOGGER = logging.getLogger(__name__)


@dataclass(slots=True)
class ValueTable:
    """Optimal values V*(layer, state) and Q*(layer, state, action)."""

    horizon: int
    values: dict[tuple[int, StateKey], float] = field(default_factory=dict)
    q_values: dict[tuple[int, StateKey, ActionId], float] = field(default_factory=dict)

    def value(self, layer: int, state: StateKey) -> float:
        return self.values[(layer, state)]

    def q_value(self, layer: int, state: StateKey, action: ActionId) -> float:
        return self.q_values[(layer, state, action)]

    def actions(self, layer: int, state: StateKey) -> dict[ActionId, float]:
        return {
            action: q
            for (q_layer, q_state, action), q in self.q_values.items()
            if q_layer == layer and q_state == state
        }


def solve(
    model: MdpModel,
    horizon: int,
    roots: list[StateKey] | None = None,
    node_budget: int = DEFAULT_ORACLE_NODE_BUDGET,
) -> ValueTable:
    """Solve the layered MDP rooted at *roots* (default: the initial state).

    Raises ``OracleInfeasibleError`` once more than *node_budget* layered
    states are reachable.
    """
    started = perf_counter()
    layered = LayeredMdp(model, horizon)
    start = roots if roots is not None else [model.initial_state()]

    # Forward pass collects the reachable states of each layer.
    layers: list[list[StateKey]] = [list(dict.fromkeys(start))]
    count = len(layers[0])
    while True:
        layer = len(layers) - 1
        frontier: dict[StateKey, None] = {}
        for state in layers[layer]:
            ls = LayeredState(state, layer)
            if layered.is_terminal(ls):
                continue
            for action in layered.enumerate_actions(ls):
                for succ, _, _ in layered.enumerate_outcomes(ls, action):
                    frontier.setdefault(succ.state)
        if not frontier:
            break
        count += len(frontier)
        if count > node_budget:
            raise OracleInfeasibleError(
                f"{model.name}: more than {node_budget} layered states "
                f"within horizon {horizon}"
            )
        layers.append(list(frontier))

    table = ValueTable(horizon)
    for layer in range(len(layers) - 1, -1, -1):
        for state in layers[layer]:
            ls = LayeredState(state, layer)
            if layered.is_terminal(ls):
                table.values[(layer, state)] = 0.0
                continue
            best = -math.inf
            for action in layered.enumerate_actions(ls):
                q = math.fsum(
                    p * (reward + table.values[(succ.layer, succ.state)])
                    for succ, p, reward in layered.enumerate_outcomes(ls, action)
                )
                table.q_values[(layer, state, action)] = q
                best = max(best, q)
            table.values[(layer, state)] = best
    _LOGGER.debug(
        "Oracle solved: model=%s, horizon=%s, states=%s, duration_ms=%.1f",
        model.name,
        horizon,
        count,
        (perf_counter() - started) * 1000,
    )
    return table


def optimal_actions(table: ValueTable, layer: int, state: StateKey) -> set[ActionId]:
    """Return every action whose Q* is within tolerance of V*."""
    best = table.value(layer, state)
    return {
        action
        for action, q in table.actions(layer, state).items()
        if abs(q - best) <= ABS_TOL
    }
