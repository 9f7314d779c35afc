"""Tests for the on-the-go abstraction engines."""

from __future__ import annotations

import itertools

import numpy as np
import pytest
from scipy.stats import chisquare

from oga_mcts.abstraction import (
    AbstractionConfig,
    EpsilonOga,
    FixedPartition,
    FixedPartitionAbstraction,
    OgaAbstraction,
    PrunedOga,
    RandomOga,
    RandomOgaAbstraction,
    build_engine,
    converge_abstraction,
    freeze_partition,
    partition_of,
    prune_outcomes,
    q_compatible,
    random_oga_update,
    transition_divergence,
    update_q_abstraction,
)
from oga_mcts.environments import build_environment
from oga_mcts.environments.figure_one import ROOT
from oga_mcts.environments.random_mdp import RandomLayeredMdp, RandomTree
from oga_mcts.exceptions import ConfigurationError
from oga_mcts.graph import (
    GROUP_PARTIAL,
    GROUP_TERMINAL,
    AbstractionHooks,
    SearchGraph,
)
from oga_mcts.mdp import ActionId, MdpModel, Outcome, StateKey
from oga_mcts.oracle import solve
from oga_mcts.policy import IntraPolicy
from oga_mcts.search import Planner, PlannerConfig


class SplitModel(MdpModel):
    """Root actions spread mass over x and y; x pays 1 and y pays 2 on exit."""

    name = "split"

    ROOT_OUTCOMES = (
        {"x": 0.6, "y": 0.4},
        {"x": 0.4, "y": 0.6},
        {"x": 1.0},
        {"y": 1.0},
    )

    def initial_state(self) -> StateKey:
        return "s"

    def _actions(self, state: StateKey) -> list[ActionId]:
        return list(range(4)) if state == "s" else [0]

    def _outcomes(self, state: StateKey, action: ActionId) -> list[Outcome]:
        if state == "s":
            return [
                Outcome(succ, p, 0.0)
                for succ, p in self.ROOT_OUTCOMES[action].items()
            ]
        return [Outcome("end", 1.0, 1.0 if state == "x" else 2.0)]

    def _is_goal(self, state: StateKey) -> bool:
        return state == "end"


def _oga_graph(model: MdpModel, horizon: int, config: AbstractionConfig, roots=None):
    graph = SearchGraph(model, horizon, hooks=OgaAbstraction(config))
    graph.enumerate_full(roots or [model.initial_state()])
    return graph


def _root_groups(graph: SearchGraph) -> set[frozenset[int]]:
    return {
        frozenset(q.action for q in abstract.members)
        for abstract in graph.q_abstract_nodes(0)
    }


def test_prune_outcomes_examples() -> None:
    outcomes = [("a", 0.5), ("b", 0.3), ("c", 0.2)]
    assert prune_outcomes(outcomes, 0.5) == [("a", 0.5), ("b", 0.3)]
    assert prune_outcomes(outcomes, 0.0) == outcomes
    assert prune_outcomes([("a", 0.5), ("b", 0.5)], 1.0) == []
    assert prune_outcomes([], 0.5) == []


def test_transition_divergence_examples() -> None:
    graph = SearchGraph(SplitModel(), 2)
    graph.enumerate_full(["s"])
    q0, q1, q2, q3 = graph.get_or_create_state_node(0, "s").children
    assert transition_divergence(q0, q1) == pytest.approx(0.4)
    assert transition_divergence(q1, q0) == pytest.approx(0.4)
    assert transition_divergence(q2, q3) == pytest.approx(2.0)
    assert transition_divergence(q0, q0) == 0.0
    assert transition_divergence(q0, q2) == pytest.approx(0.8)


def test_q_compatible_examples(figure_one_graph: SearchGraph) -> None:
    config = AbstractionConfig(variant=EpsilonOga(0.1, 0.0))
    root = figure_one_graph.get_or_create_state_node(0, ROOT)
    q = {c.action: c for c in root.children}
    assert q_compatible(q[2], q[3], config)
    assert q_compatible(q[0], q[1], config)
    assert not q_compatible(q[1], q[2], config)
    exact = AbstractionConfig(variant=PrunedOga(0.0))
    for action in range(4):
        assert q_compatible(q[action], q[action], config)
        assert q_compatible(q[action], q[action], exact)
    assert not q_compatible(q[2], q[3], exact)


def test_fresh_qnode_is_singleton(figure_one) -> None:
    config = AbstractionConfig()
    graph = SearchGraph(figure_one, 1, hooks=OgaAbstraction(config))
    root = graph.get_or_create_state_node(0, ROOT)
    q = graph.expand(root, root.untried.pop(0))
    assert q.abstract.members == [q]
    assert not update_q_abstraction(q, graph, config)


def test_figure_one_converges_to_pairs(figure_one_graph: SearchGraph) -> None:
    config = AbstractionConfig(variant=EpsilonOga(0.1, 0.0))
    partition = converge_abstraction(figure_one_graph, config)
    assert _root_groups(figure_one_graph) == {frozenset({0, 1}), frozenset({2, 3})}
    assert frozenset({(0, ROOT, 2), (0, ROOT, 3)}) in partition.q_groups
    figure_one_graph.audit()


def test_figure_one_groups_form_during_search(figure_one) -> None:
    config = PlannerConfig(
        abstraction=AbstractionConfig(variant=EpsilonOga(0.1, 0.0), recency=1),
        policy=IntraPolicy.UCT,
        budget=100,
    )
    result = Planner(figure_one, config).search(
        ROOT, 1, np.random.default_rng(0)
    )
    assert _root_groups(result.graph) == {frozenset({0, 1}), frozenset({2, 3})}


def test_chain_converges_to_known_partition(chain) -> None:
    config = AbstractionConfig(variant=PrunedOga(0.0))
    graph = _oga_graph(chain, 2, config, roots=[1, 2])
    partition = converge_abstraction(graph, config)
    assert partition.state_groups_at(0) == {frozenset({1, 2})}
    assert partition.state_groups_at(1) == {frozenset({3, 4})}
    assert partition.state_groups_at(2) == {frozenset({5})}
    assert set(partition.q_groups) == {
        frozenset({(0, 1, 0), (0, 2, 0)}),
        frozenset({(1, 3, 0), (1, 4, 0)}),
    }
    graph.audit()


def test_converge_is_idempotent() -> None:
    config = AbstractionConfig(variant=PrunedOga(0.0), pg=True)
    for seed in range(10):
        model = RandomLayeredMdp(seed=seed)
        graph = _oga_graph(model, model.depth, config, roots=model.roots())
        once = converge_abstraction(graph, config)
        assert converge_abstraction(graph, config) == once


def test_distinct_rewards_stay_singletons() -> None:
    config = AbstractionConfig(variant=PrunedOga(0.0))
    tree = RandomTree(seed=4, actions=6)
    graph = _oga_graph(tree, 1, config)
    converge_abstraction(graph, config)
    assert all(len(a.members) == 1 for a in graph.q_abstract_nodes(0))


def test_alpha_one_groups_by_reward_only() -> None:
    exact = AbstractionConfig(variant=PrunedOga(0.0))
    graph = _oga_graph(SplitModel(), 2, exact)
    converge_abstraction(graph, exact)
    assert _root_groups(graph) == {frozenset({a}) for a in range(4)}

    blind = AbstractionConfig(variant=PrunedOga(1.0))
    graph = _oga_graph(SplitModel(), 2, blind)
    converge_abstraction(graph, blind)
    assert _root_groups(graph) == {frozenset(range(4))}
    # x and y pay differently, so their actions stay apart.
    assert len(graph.q_abstract_nodes(1)) == 2


def test_epsilon_transition_tolerance() -> None:
    config = AbstractionConfig(variant=EpsilonOga(0.0, 0.4))
    graph = _oga_graph(SplitModel(), 2, config)
    converge_abstraction(graph, config)
    assert _root_groups(graph) == {
        frozenset({0, 1}),
        frozenset({2}),
        frozenset({3}),
    }


def test_epsilon_compatibility_is_symmetric() -> None:
    config = AbstractionConfig(variant=EpsilonOga(1.0, 0.8))
    for seed in range(5):
        model = RandomLayeredMdp(seed=seed, reward_levels=(0.0, 0.5, 2.0))
        graph = _oga_graph(model, model.depth, config, roots=model.roots())
        converge_abstraction(graph, config)
        for layer in range(graph.depth):
            for q1, q2 in itertools.combinations(graph.q_nodes(layer), 2):
                assert q_compatible(q1, q2, config) == q_compatible(q2, q1, config)


@pytest.mark.parametrize("pg", [False, True])
def test_exact_abstraction_preserves_optimal_values(pg: bool) -> None:
    config = AbstractionConfig(variant=PrunedOga(0.0), pg=pg)
    merged = 0
    for seed in range(100):
        model = RandomLayeredMdp(seed=seed, depth=3, width=3, actions=2)
        roots = model.roots()
        graph = _oga_graph(model, model.depth, config, roots=roots)
        converge_abstraction(graph, config)
        table = solve(model, model.depth, roots=roots)
        for layer in range(graph.depth):
            for abstract in graph.q_abstract_nodes(layer):
                values = [
                    table.q_value(layer, q.parent.state, q.action)
                    for q in abstract.members
                ]
                merged += len(values) > 1
                assert max(values) - min(values) <= 1e-9
    assert merged > 0


def test_pg_groups_partially_expanded_states() -> None:
    model = build_environment("navigation")
    config = AbstractionConfig(pg=True)
    graph = SearchGraph(model, 5, hooks=OgaAbstraction(config))
    a = graph.get_or_create_state_node(1, (1, 0))
    b = graph.get_or_create_state_node(1, (0, 1))
    assert a.abstract is b.abstract
    assert a.abstract.kind == GROUP_PARTIAL

    while a.untried:
        graph.expand(a, a.untried.pop(0))
    assert a.abstract is not b.abstract
    assert a.abstract.kind == ""

    plain = SearchGraph(model, 5, hooks=OgaAbstraction(AbstractionConfig()))
    c = plain.get_or_create_state_node(1, (1, 0))
    d = plain.get_or_create_state_node(1, (0, 1))
    assert c.abstract is not d.abstract


def test_terminal_states_share_a_group(figure_one_graph: SearchGraph) -> None:
    groups = figure_one_graph.state_abstract_nodes(1)
    assert [g.kind for g in groups] == [GROUP_TERMINAL]


def test_random_oga_draws_uniformly_over_layer_nodes(figure_one) -> None:
    # bin 0: q0 drew its own node and stayed alone
    counts = [0, 0, 0, 0]
    rng = np.random.default_rng(5)
    trials = 4000
    for _ in range(trials):
        graph = SearchGraph(figure_one, 1)
        graph.enumerate_full([ROOT])
        q0, *others = graph.get_or_create_state_node(0, ROOT).children
        random_oga_update(q0, graph, 1.0, rng)
        joined = [i for i, q in enumerate(others) if q.abstract is q0.abstract]
        assert len(joined) <= 1
        if joined:
            counts[joined[0] + 1] += 1
        else:
            assert q0.abstract.members == [q0]
            counts[0] += 1
        graph.audit()
    assert chisquare(counts).pvalue > 1e-3


def test_random_oga_respects_probability_and_singletons(figure_one, rng) -> None:
    graph = SearchGraph(figure_one, 1)
    graph.enumerate_full([ROOT])
    q0, q1, q2, q3 = graph.get_or_create_state_node(0, ROOT).children
    for _ in range(20):
        random_oga_update(q0, graph, 0.0, rng)
    assert q0.abstract.members == [q0]
    for _ in range(100):
        random_oga_update(q0, graph, 1.0, rng)
        if len(q0.abstract.members) > 1:
            break
    grouped = q0.abstract
    assert len(grouped.members) == 2
    random_oga_update(q0, graph, 1.0, rng)
    assert q0.abstract is grouped


@pytest.mark.parametrize("recency", [1, 3, 5])
def test_recency_checks_fire_every_kth_visit(recency: int) -> None:
    model = build_environment("navigation")
    config = PlannerConfig(
        abstraction=AbstractionConfig(variant=PrunedOga(0.0), recency=recency),
        budget=300,
    )
    result = Planner(model, config).search(
        model.initial_state(), 8, np.random.default_rng(2)
    )
    graph = result.graph
    for layer in range(graph.depth):
        for q in graph.q_nodes(layer):
            assert q.checks == q.visits // recency


def test_frozen_partition_replays(chain) -> None:
    config = AbstractionConfig(variant=PrunedOga(0.0))
    graph = _oga_graph(chain, 2, config, roots=[1, 2])
    converged = converge_abstraction(graph, config)
    labels = freeze_partition(graph)

    replay = SearchGraph(chain, 2, hooks=FixedPartitionAbstraction(labels=labels))
    replay.enumerate_full([1, 2])
    assert set(partition_of(replay).q_groups) == set(converged.q_groups)


def test_build_engine_dispatch() -> None:
    assert isinstance(build_engine(AbstractionConfig()), OgaAbstraction)
    assert isinstance(
        build_engine(AbstractionConfig(variant=FixedPartition(((0, 1),)))),
        FixedPartitionAbstraction,
    )
    assert type(build_engine(None)) is AbstractionHooks
    assert isinstance(
        build_engine(AbstractionConfig(variant=RandomOga(0.5))), RandomOgaAbstraction
    )


@pytest.mark.parametrize(
    "variant",
    [PrunedOga(1.5), EpsilonOga(-1.0, 0.0), EpsilonOga(0.0, 2.5), RandomOga(1.2)],
)
def test_invalid_parameters_are_rejected(variant) -> None:
    with pytest.raises(ConfigurationError):
        AbstractionConfig(variant=variant)
    with pytest.raises(ConfigurationError):
        AbstractionConfig(recency=0)
