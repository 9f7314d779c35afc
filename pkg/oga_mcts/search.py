"""MCTS planner: iterations, rollouts and the per-step decision."""

from __future__ import annotations

from dataclasses import dataclass

from .abstraction import AbstractionConfig, build_engine
from .const import DEFAULT_EXPLORATION_C, DEFAULT_RECENCY
from .exceptions import ConfigurationError
from .graph import SearchGraph, StateNode
from .mdp import ActionId, LayeredMdp, LayeredState, MdpModel, RandomStream, StateKey
from .policy import (
    ExplorationConfig,
    IntraPolicy,
    SearchCounters,
    exploration_factor,
    root_decision,
    tree_policy_step,
)


def rollout(layered: LayeredMdp, state: LayeredState, rng: RandomStream) -> list[float]:
    """Play uniformly random actions from *state* to the horizon."""
    rewards: list[float] = []
    while not layered.is_terminal(state):
        actions = layered.enumerate_actions(state)
        action = actions[int(rng.integers(len(actions)))]
        state, _, reward = layered.sample_transition(state, action, rng)
        rewards.append(reward)
    return rewards


@dataclass(frozen=True, kw_only=True)
class PlannerConfig:
    """One agent: abstraction, intra policy, exploration and budget."""

    abstraction: AbstractionConfig | None = None
    policy: IntraPolicy = IntraPolicy.UCT
    exploration: ExplorationConfig = ExplorationConfig(DEFAULT_EXPLORATION_C)
    budget: int = 100

    def __post_init__(self) -> None:
        if self.budget < 1:
            raise ConfigurationError(f"budget must be >= 1: {self.budget}")

    @property
    def recency(self) -> int:
        return self.abstraction.recency if self.abstraction else DEFAULT_RECENCY


@dataclass(frozen=True, slots=True)
class SearchResult:
    graph: SearchGraph
    root: StateNode
    action: ActionId


class Planner:
    """Runs budgeted MCTS searches on fresh graphs for one model."""

    def __init__(self, model: MdpModel, config: PlannerConfig) -> None:
        self.model = model
        self.config = config

    def new_graph(self, horizon: int) -> SearchGraph:
        return SearchGraph(
            self.model,
            horizon,
            hooks=build_engine(self.config.abstraction),
            recency=self.config.recency,
        )

    def iterate(
        self,
        graph: SearchGraph,
        root: StateNode,
        rng: RandomStream,
        counters: SearchCounters | None = None,
    ) -> None:
        """Run one select-expand-rollout-backup iteration from *root*."""
        lam = exploration_factor(graph.stats, self.config.exploration.c)
        policy = self.config.policy
        node = root
        path = []
        rewards: list[float] = []
        while not node.terminal:
            q = tree_policy_step(graph, node, lam, policy, rng, counters)
            succ, probability, reward = graph.layered.sample_transition(
                node.layered_state, q.action, rng
            )
            child = graph.get_or_create_state_node(succ.layer, succ.state)
            graph.record_outcome(q, child, probability, reward)
            path.append(q)
            rewards.append(reward)
            node = child
            if q.visits == 0:
                break
        rewards.extend(rollout(graph.layered, node.layered_state, rng))
        graph.backprop(path, rewards, rng)
        if counters is not None:
            counters.iterations += 1

    def search(
        self,
        state: StateKey,
        horizon: int,
        rng: RandomStream,
        counters: SearchCounters | None = None,
    ) -> SearchResult:
        """Search *state* with a fresh graph of *horizon* layers and decide."""
        graph = self.new_graph(horizon)
        root = graph.get_or_create_state_node(0, state)
        for _ in range(self.config.budget):
            self.iterate(graph, root, rng, counters)
        action = root_decision(root, self.config.policy, rng)
        return SearchResult(graph=graph, root=root, action=action)

    def decide(
        self,
        state: StateKey,
        horizon: int,
        rng: RandomStream,
        counters: SearchCounters | None = None,
    ) -> ActionId:
        return self.search(state, horizon, rng, counters).action
