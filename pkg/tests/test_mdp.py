"""Tests for the MDP contract and the layered wrapper."""

from __future__ import annotations

from collections import deque

import numpy as np
import pytest
from scipy.stats import chisquare

from oga_mcts.environments import ENVIRONMENT_DESCRIPTIONS, build_environment
from oga_mcts.environments.figure_one import LEAF, ROOT, FigureOneTree
from oga_mcts.environments.racetrack import ACCELERATIONS
from oga_mcts.exceptions import ContractViolationError
from oga_mcts.mdp import LayeredMdp, LayeredState, MdpModel, Outcome, merge_outcomes


def _reachable(model: MdpModel, limit: int = 50) -> list:
    start = model.initial_state()
    seen = {start}
    queue = deque([start])
    order = []
    while queue and len(order) < limit:
        state = queue.popleft()
        order.append(state)
        if model.is_terminal(state):
            continue
        for action in model.enumerate_actions(state):
            for outcome in model.enumerate_outcomes(state, action):
                if outcome.successor not in seen:
                    seen.add(outcome.successor)
                    queue.append(outcome.successor)
    return order


def test_figure_one_actions_and_transition(rng: np.random.Generator) -> None:
    model = FigureOneTree()
    assert model.enumerate_actions(ROOT) == [0, 1, 2, 3]
    outcome = model.sample_transition(ROOT, 3, rng)
    assert outcome == Outcome(LEAF, 1.0, 1.1)
    assert model.is_terminal(LEAF)
    assert model.enumerate_outcomes(ROOT, 0) == [Outcome(LEAF, 1.0, 0.5)]


def test_chain_single_move(chain, rng: np.random.Generator) -> None:
    assert chain.enumerate_actions(1) == [0]
    assert chain.sample_transition(1, 0, rng) == Outcome(3, 1.0, 0.0)


def test_terminal_and_illegal_queries_raise(figure_one, rng) -> None:
    with pytest.raises(ContractViolationError):
        figure_one.enumerate_actions(LEAF)
    with pytest.raises(ContractViolationError):
        figure_one.sample_transition(ROOT, 4, rng)
    with pytest.raises(ContractViolationError):
        figure_one.enumerate_outcomes(ROOT, -1)


def test_navigation_interior_cell_has_four_moves() -> None:
    model = build_environment("navigation")
    assert len(model.enumerate_actions((2, 2))) == 4
    assert len(model.enumerate_actions((0, 0))) == 2
    assert model.is_terminal((4, 4))


def test_navigation_disappear_outcomes() -> None:
    model = build_environment("navigation")
    # Moving north from (2, 0) enters row 1, where the robot is lost with 0.1.
    outcomes = model.enumerate_outcomes((2, 0), 0)
    assert [o.successor for o in outcomes] == [(2, 1), (-1, -1)]
    assert [o.probability for o in outcomes] == pytest.approx([0.9, 0.1])
    assert all(o.reward == -1.0 for o in outcomes)


def test_tireworld_drive_may_go_flat() -> None:
    model = build_environment("tireworld")
    state = model.initial_state()
    outcomes = model.enumerate_outcomes(state, 0)
    assert len(outcomes) == 2
    assert {o.probability for o in outcomes} == {0.5}
    flats = {o.successor[2] for o in outcomes}
    assert flats == {True, False}


def test_sailing_outcomes_follow_wind_row() -> None:
    model = build_environment("sailing")
    state = model.initial_state()
    for action in model.enumerate_actions(state):
        outcomes = model.enumerate_outcomes(state, action)
        assert sum(o.probability for o in outcomes) == pytest.approx(1.0, abs=1e-9)
        assert len(outcomes) == 5
        assert len({o.reward for o in outcomes}) == 1
        assert outcomes[0].reward < 0


def test_racetrack_slip_frequencies() -> None:
    model = build_environment("racetrack")
    state = model.initial_state()
    action = ACCELERATIONS.index((0, -1))
    outcomes = model.enumerate_outcomes(state, action)
    assert len(outcomes) == 2
    expected = {o.successor: o.probability for o in outcomes}
    assert expected[state] == pytest.approx(0.1)

    rng = np.random.default_rng(7)
    draws = 100_000
    counts = dict.fromkeys(expected, 0)
    for _ in range(draws):
        outcome = model.sample_transition(state, action, rng)
        assert outcome.probability == expected[outcome.successor]
        counts[outcome.successor] += 1
    observed = [counts[s] for s in expected]
    result = chisquare(observed, [expected[s] * draws for s in expected])
    assert result.pvalue > 1e-3


@pytest.mark.parametrize(
    "name",
    [
        d.key
        for d in ENVIRONMENT_DESCRIPTIONS
        if d.key not in ("random_mdp", "random_tree")
    ],
)
def test_environments_pass_audit(name: str) -> None:
    model = build_environment(name)
    for state in _reachable(model):
        model.audit(state)


def test_random_environments_pass_audit() -> None:
    for seed in range(5):
        model = build_environment("random_mdp", {"seed": seed})
        for state in _reachable(model):
            model.audit(state)
        tree = build_environment("random_tree", {"seed": seed})
        tree.audit(tree.initial_state())


@pytest.mark.parametrize("name", ["game_of_life", "sailing", "tireworld"])
def test_sampled_outcome_is_enumerated(name: str) -> None:
    model = build_environment(name)
    rng = np.random.default_rng(3)
    state = model.initial_state()
    for action in model.enumerate_actions(state):
        support = {o.successor: o for o in model.enumerate_outcomes(state, action)}
        for _ in range(50):
            outcome = model.sample_transition(state, action, rng)
            assert outcome.successor in support
            assert outcome.probability == support[outcome.successor].probability
            assert outcome.reward == support[outcome.successor].reward


def test_action_ordering_is_stable() -> None:
    model = build_environment("racetrack")
    state = model.initial_state()
    assert model.enumerate_actions(state) == model.enumerate_actions(state)


def test_merge_outcomes_sums_duplicates() -> None:
    merged = merge_outcomes(
        [Outcome("a", 0.9, -1.0), Outcome("b", 0.05, -1.0), Outcome("a", 0.05, -1.0)]
    )
    assert [o.successor for o in merged] == ["a", "b"]
    assert merged[0].probability == pytest.approx(0.95)


def test_layered_wrapper_terminal_at_horizon(chain) -> None:
    layered = LayeredMdp(chain, horizon=1)
    assert not layered.is_terminal(LayeredState(1, 0))
    assert layered.is_terminal(LayeredState(3, 1))
    assert layered.enumerate_outcomes(LayeredState(1, 0), 0) == [
        (LayeredState(3, 1), 1.0, 0.0)
    ]
    with pytest.raises(ContractViolationError):
        layered.enumerate_actions(LayeredState(3, 1))


def test_layered_wrapper_default_horizon() -> None:
    model = build_environment("game_of_life")
    layered = LayeredMdp(model, horizon=50)
    assert layered.is_terminal(LayeredState(model.initial_state(), 50))
    assert not layered.is_terminal(LayeredState(model.initial_state(), 49))
