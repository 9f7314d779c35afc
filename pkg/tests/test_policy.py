"""Tests for UCB selection and the intra-abstraction policies."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.stats import binomtest

from oga_mcts.abstraction import (
    AbstractionConfig,
    FixedPartition,
    FixedPartitionAbstraction,
)
from oga_mcts.environments.figure_one import (
    DEFAULT_REWARDS,
    LEAF,
    ROOT,
    FigureOneTree,
)
from oga_mcts.environments.random_mdp import RandomTree
from oga_mcts.exceptions import (
    ConfigurationError,
    ContractViolationError,
    InvariantError,
)
from oga_mcts.graph import QNode, SearchGraph
from oga_mcts.policy import (
    ExplorationConfig,
    IntraPolicy,
    QStatsAccumulator,
    SearchCounters,
    exploration_factor,
    intra_select_decision,
    intra_select_tree,
    root_decision,
    select_abstract_action,
    ucb_value,
)
from oga_mcts.search import Planner, PlannerConfig

TRIALS = 10_000


def _children(graph: SearchGraph) -> list[QNode]:
    graph.enumerate_full([graph.model.initial_state()])
    root = graph.get_or_create_state_node(0, graph.model.initial_state())
    return sorted(root.children, key=lambda q: q.action)


def _feed(graph: SearchGraph, q: QNode, reward: float, times: int, rng) -> None:
    for _ in range(times):
        graph.backprop([q], [reward], rng)


def _set_stats(members: list[QNode], visits: list[int], returns: list[float]) -> None:
    for q, n, v in zip(members, visits, returns, strict=True):
        q.visits = n
        q.return_sum = v
    members[0].parent.total_child_visits = sum(visits)


def _accumulator(values: list[float]) -> QStatsAccumulator:
    acc = QStatsAccumulator()
    for value in values:
        acc.add(value)
    return acc


def _fed_pairs(rng) -> tuple[SearchGraph, list[QNode]]:
    graph = SearchGraph(
        FigureOneTree(), 1, hooks=FixedPartitionAbstraction(((0, 1), (2, 3)))
    )
    children = _children(graph)
    for q, reward in zip(children, DEFAULT_REWARDS, strict=True):
        _feed(graph, q, reward, 10, rng)
    return graph, children


def test_exploration_factor_examples() -> None:
    assert exploration_factor(_accumulator([1.0, 1.0, 1.0]), 2.0) == 0.0
    assert exploration_factor(_accumulator([0.0, 2.0]), 2.0) == pytest.approx(2.0)
    assert exploration_factor(QStatsAccumulator(), 2.0) == 0.0
    assert exploration_factor(_accumulator([5.0]), 2.0) == 0.0


def test_exploration_constant_must_be_positive() -> None:
    with pytest.raises(ConfigurationError):
        ExplorationConfig(0.0)


def test_ucb_value_examples() -> None:
    assert ucb_value(4, 2.0, 16, 0.0) == 0.5
    assert ucb_value(4, 2.0, 16, 1.0) == pytest.approx(1.33255, abs=1e-5)
    assert ucb_value(5, 2.5, 5, 2.0) == pytest.approx(
        0.5 + 2.0 * math.sqrt(math.log(5) / 5)
    )
    with pytest.raises(InvariantError):
        ucb_value(0, 0.0, 10, 1.0)


def test_select_abstract_action_prefers_higher_group(rng) -> None:
    graph, children = _fed_pairs(rng)
    root = children[0].parent
    chosen = select_abstract_action(root, 0.0, rng)
    assert chosen is children[2].abstract
    assert graph.abstract_stats(chosen) == (20, pytest.approx(21.0))


def test_select_abstract_action_ties_are_uniform(rng) -> None:
    graph = SearchGraph(RandomTree(seed=0, actions=2), 1)
    first, second = _children(graph)
    _feed(graph, first, 0.5, 5, rng)
    _feed(graph, second, 0.5, 5, rng)
    root = first.parent
    picks = sum(
        select_abstract_action(root, 1.0, rng) is first.abstract for _ in range(TRIALS)
    )
    assert binomtest(picks, TRIALS, 0.5).pvalue > 1e-3


def test_singleton_member_is_returned_for_every_policy(rng) -> None:
    q = _children(SearchGraph(FigureOneTree(), 1))[0]
    for policy in IntraPolicy:
        assert intra_select_tree(policy, [q], 1.0, rng) is q
        assert intra_select_decision(policy, [q], rng) is q


def test_empty_members_raise(rng) -> None:
    with pytest.raises(InvariantError):
        intra_select_tree(IntraPolicy.UCT, [], 1.0, rng)
    with pytest.raises(InvariantError):
        intra_select_decision(IntraPolicy.GREEDY, [], rng)


def test_count_based_policies(rng) -> None:
    members = _children(SearchGraph(FigureOneTree(), 1))[2:]
    _set_stats(members, [3, 5], [3.0, 5.5])
    low, high = members
    assert intra_select_tree(IntraPolicy.LEAST_VISITS, members, 1.0, rng) is low
    assert intra_select_tree(IntraPolicy.MOST_VISITS, members, 1.0, rng) is high
    assert intra_select_tree(IntraPolicy.FIRST, members, 1.0, rng) is low


def test_least_outcomes_prefers_less_sampled_mass(rng) -> None:
    members = _children(SearchGraph(FigureOneTree(), 1))[:2]
    members[0].prob_mass = 1.0
    members[1].prob_mass = 0.3
    chosen = intra_select_tree(IntraPolicy.LEAST_OUTCOMES, members, 0.0, rng)
    assert chosen is members[1]


@pytest.mark.parametrize("policy", [IntraPolicy.UCT, IntraPolicy.GREEDY])
def test_value_policies_pick_the_better_member(policy: IntraPolicy, rng) -> None:
    _, children = _fed_pairs(rng)
    members = children[2:]
    assert intra_select_tree(policy, members, 0.0, rng).action == 3
    assert intra_select_decision(policy, members, rng).action == 3


@pytest.mark.parametrize("policy", [IntraPolicy.UCT, IntraPolicy.GREEDY])
def test_unvisited_member_comes_first(policy: IntraPolicy, rng) -> None:
    members = _children(SearchGraph(FigureOneTree(), 1))[2:]
    _set_stats(members, [0, 10], [0.0, 11.0])
    assert intra_select_tree(policy, members, 1.0, rng) is members[0]
    # Decisions only consider visited members.
    assert intra_select_decision(policy, members, rng) is members[1]


def test_first_decides_lowest_action(rng) -> None:
    _, children = _fed_pairs(rng)
    assert intra_select_decision(IntraPolicy.FIRST, children[2:], rng).action == 2


@pytest.mark.parametrize("policy", [IntraPolicy.RANDOM, IntraPolicy.RANDOM_GREEDY])
def test_random_tree_choice_is_uniform(policy: IntraPolicy, rng) -> None:
    _, children = _fed_pairs(rng)
    members = children[2:]
    picks = sum(
        intra_select_tree(policy, members, 1.0, rng) is members[0]
        for _ in range(TRIALS)
    )
    assert binomtest(picks, TRIALS, 0.5).pvalue > 1e-3


def test_random_decision_is_uniform_and_random_greedy_is_not(rng) -> None:
    _, children = _fed_pairs(rng)
    members = children[2:]
    picks = sum(
        intra_select_decision(IntraPolicy.RANDOM, members, rng) is members[0]
        for _ in range(TRIALS)
    )
    assert binomtest(picks, TRIALS, 0.5).pvalue > 1e-3
    assert intra_select_decision(IntraPolicy.RANDOM_GREEDY, members, rng).action == 3


def test_uct_choice_is_shift_invariant() -> None:
    rng = np.random.default_rng(9)
    for trial in range(50):
        members = _children(SearchGraph(RandomTree(seed=trial, actions=5), 1))
        visits = [int(n) for n in rng.integers(1, 30, size=5)]
        returns = [float(r) for r in rng.uniform(-5.0, 5.0, size=5)]
        shift = float(rng.uniform(-3.0, 3.0))
        lam = float(rng.uniform(0.1, 2.0))

        _set_stats(members, visits, returns)
        before = intra_select_tree(
            IntraPolicy.UCT, members, lam, np.random.default_rng(0)
        )
        shifted = [v + shift * n for v, n in zip(returns, visits, strict=True)]
        _set_stats(members, visits, shifted)
        after = intra_select_tree(
            IntraPolicy.UCT, members, lam, np.random.default_rng(0)
        )
        assert after is before


@pytest.mark.parametrize(
    ("abstraction", "ratio"),
    [
        (AbstractionConfig(variant=FixedPartition(((0, 1), (2, 3)))), 1.0),
        (None, 0.0),
    ],
)
def test_query_ratio_on_four_action_tree(abstraction, ratio: float) -> None:
    config = PlannerConfig(abstraction=abstraction, budget=200)
    counters = SearchCounters()
    Planner(FigureOneTree(), config).search(
        ROOT, 1, np.random.default_rng(3), counters
    )
    assert counters.iterations == 200
    assert counters.expansions == 4
    assert counters.steps == 196
    assert counters.query_ratio == ratio


def test_counters_merge_and_empty_ratio() -> None:
    total = SearchCounters()
    assert total.query_ratio == 0.0
    total.merge(SearchCounters(iterations=2, expansions=1, steps=4, queried=1))
    total.merge(SearchCounters(iterations=3, expansions=0, steps=4, queried=3))
    assert (total.iterations, total.expansions, total.steps, total.queried) == (
        5,
        1,
        8,
        4,
    )
    assert total.query_ratio == 0.5


def test_root_decision_without_visits_is_legal(rng) -> None:
    graph = SearchGraph(FigureOneTree(), 1)
    root = graph.get_or_create_state_node(0, ROOT)
    graph.expand(root, root.untried.pop(0))
    for _ in range(20):
        assert root_decision(root, IntraPolicy.UCT, rng) in {0, 1, 2, 3}


def test_root_decision_with_singletons_is_greedy(rng) -> None:
    graph = SearchGraph(FigureOneTree(), 1)
    children = _children(graph)
    for q, reward in zip(children, DEFAULT_REWARDS, strict=True):
        leaf = graph.get_or_create_state_node(1, LEAF)
        assert q.outcomes[leaf][1] == reward
        _feed(graph, q, reward, 3, rng)
    for policy in IntraPolicy:
        assert root_decision(children[0].parent, policy, rng) == 3


def test_root_decision_inside_best_group(rng) -> None:
    _, children = _fed_pairs(rng)
    root = children[0].parent
    assert root_decision(root, IntraPolicy.UCT, rng) == 3
    assert root_decision(root, IntraPolicy.FIRST, rng) == 2
    picks = sum(
        root_decision(root, IntraPolicy.RANDOM, rng) == 2 for _ in range(TRIALS)
    )
    assert binomtest(picks, TRIALS, 0.5).pvalue > 1e-3


def test_root_decision_at_terminal_root_raises(rng) -> None:
    graph = SearchGraph(FigureOneTree(), 1)
    leaf = graph.get_or_create_state_node(0, LEAF)
    assert leaf.terminal
    with pytest.raises(ContractViolationError):
        root_decision(leaf, IntraPolicy.UCT, rng)
    planner = Planner(FigureOneTree(), PlannerConfig(budget=5))
    with pytest.raises(ContractViolationError):
        planner.search(LEAF, 1, rng)
