"""UCB selection over abstract actions and the intra-abstraction policies."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING, TypeVar

from .exceptions import ConfigurationError, ContractViolationError, InvariantError
from .mdp import ActionId, RandomStream

if TYPE_CHECKING:
    from .graph import QAbstractNode, QNode, SearchGraph, StateNode

_T = TypeVar("_T")


class IntraPolicy(StrEnum):
    """Rule picking a ground action among same-parent members of an abstract node."""

    RANDOM = "random"
    FIRST = "first"
    RANDOM_GREEDY = "random_greedy"
    LEAST_VISITS = "least_visits"
    LEAST_OUTCOMES = "least_outcomes"
    GREEDY = "greedy"
    MOST_VISITS = "most_visits"
    UCT = "uct"


@dataclass(slots=True)
class QStatsAccumulator:
    """Running sums over Q-value snapshots taken at every backup."""

    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    def add(self, value: float) -> None:
        self.count += 1
        self.total += value
        self.total_sq += value * value

    @property
    def variance(self) -> float:
        if self.count == 0:
            return 0.0
        mean = self.total / self.count
        return self.total_sq / self.count - mean * mean

    @property
    def std(self) -> float:
        # Cancellation can leave a tiny negative variance.
        return math.sqrt(max(self.variance, 0.0))


@dataclass(frozen=True, slots=True)
class ExplorationConfig:
    """Global-Std exploration: lambda = C * sigma."""

    c: float

    def __post_init__(self) -> None:
        if not self.c > 0.0:
            raise ConfigurationError(f"exploration constant must be positive: {self.c}")


@dataclass(slots=True)
class SearchCounters:
    """Tree-policy instrumentation for one search or one episode."""

    iterations: int = 0
    expansions: int = 0
    steps: int = 0
    queried: int = 0

    @property
    def query_ratio(self) -> float:
        """Queried steps over non-expansion tree-policy steps (0 when none)."""
        return self.queried / self.steps if self.steps else 0.0

    def merge(self, other: SearchCounters) -> None:
        self.iterations += other.iterations
        self.expansions += other.expansions
        self.steps += other.steps
        self.queried += other.queried


def exploration_factor(acc: QStatsAccumulator, c: float) -> float:
    """Return C times the population std of the accumulated Q values."""
    if acc.count < 2:
        return 0.0
    return c * acc.std


def ucb_value(visits: int, returns: float, parent_total: int, lam: float) -> float:
    if visits < 1:
        raise InvariantError("UCB evaluated on an unvisited node")
    bonus = 0.0
    if lam:
        bonus = lam * math.sqrt(math.log(parent_total) / visits)
    return returns / visits + bonus


def _pick(items: Sequence[_T], rng: RandomStream) -> _T:
    if len(items) == 1:
        return items[0]
    return items[int(rng.integers(len(items)))]


def _best(
    items: Sequence[_T], key: Callable[[_T], float], rng: RandomStream
) -> _T:
    """Return an argmax of *key*; ties are broken uniformly with *rng*."""
    best_value = -math.inf
    best: list[_T] = []
    for item in items:
        value = key(item)
        if value > best_value:
            best_value = value
            best = [item]
        elif value == best_value:
            best.append(item)
    if not best:
        # Every key was -inf.
        best = list(items)
    return _pick(best, rng)


def _abstract_groups(sn: StateNode) -> dict[int, QAbstractNode]:
    """Distinct abstract nodes of *sn*'s children in first-appearance order."""
    groups: dict[int, QAbstractNode] = {}
    for q in sn.children:
        groups.setdefault(q.abstract.id, q.abstract)
    return groups


def select_abstract_action(
    sn: StateNode, lam: float, rng: RandomStream
) -> QAbstractNode:
    """Return the abstract node among *sn*'s children maximizing aggregated UCB."""
    parent_total = sn.total_child_visits
    groups = list(_abstract_groups(sn).values())
    return _best(
        groups,
        lambda a: ucb_value(a.agg_visits, a.agg_returns, parent_total, lam),
        rng,
    )


# ----------------------------------------------------------------------
# Intra-abstraction policies
# ----------------------------------------------------------------------


def _unvisited_first(
    members: Sequence[QNode], rng: RandomStream
) -> QNode | None:
    unvisited = [q for q in members if q.visits == 0]
    return _pick(unvisited, rng) if unvisited else None


def _tree_random(members: Sequence[QNode], lam: float, rng: RandomStream) -> QNode:
    return _pick(members, rng)


def _tree_first(members: Sequence[QNode], lam: float, rng: RandomStream) -> QNode:
    return min(members, key=lambda q: q.action)


def _tree_least_visits(
    members: Sequence[QNode], lam: float, rng: RandomStream
) -> QNode:
    return _best(members, lambda q: -q.visits, rng)


def _tree_least_outcomes(
    members: Sequence[QNode], lam: float, rng: RandomStream
) -> QNode:
    return _best(members, lambda q: -q.prob_mass, rng)


def _tree_greedy(members: Sequence[QNode], lam: float, rng: RandomStream) -> QNode:
    fresh = _unvisited_first(members, rng)
    if fresh is not None:
        return fresh
    return _best(members, lambda q: q.return_sum / q.visits, rng)


def _tree_most_visits(
    members: Sequence[QNode], lam: float, rng: RandomStream
) -> QNode:
    return _best(members, lambda q: q.visits, rng)


def _tree_uct(members: Sequence[QNode], lam: float, rng: RandomStream) -> QNode:
    fresh = _unvisited_first(members, rng)
    if fresh is not None:
        return fresh
    parent_total = members[0].parent.total_child_visits
    return _best(
        members, lambda q: ucb_value(q.visits, q.return_sum, parent_total, lam), rng
    )


def _decide_random(members: Sequence[QNode], rng: RandomStream) -> QNode:
    return _pick(members, rng)


def _decide_first(members: Sequence[QNode], rng: RandomStream) -> QNode:
    return min(members, key=lambda q: q.action)


def _decide_greedy(members: Sequence[QNode], rng: RandomStream) -> QNode:
    visited = [q for q in members if q.visits > 0]
    if not visited:
        return _pick(members, rng)
    return _best(visited, lambda q: q.return_sum / q.visits, rng)


@dataclass(frozen=True, kw_only=True)
class IntraPolicyDescription:
    """Describes how one intra policy acts in the tree and at the root."""

    key: IntraPolicy
    tree_fn: Callable[[Sequence[QNode], float, RandomStream], QNode]
    decision_fn: Callable[[Sequence[QNode], RandomStream], QNode] = field(
        default=_decide_greedy
    )


INTRA_POLICY_DESCRIPTIONS: tuple[IntraPolicyDescription, ...] = (
    IntraPolicyDescription(
        key=IntraPolicy.RANDOM, tree_fn=_tree_random, decision_fn=_decide_random
    ),
    IntraPolicyDescription(
        key=IntraPolicy.FIRST, tree_fn=_tree_first, decision_fn=_decide_first
    ),
    IntraPolicyDescription(key=IntraPolicy.RANDOM_GREEDY, tree_fn=_tree_random),
    IntraPolicyDescription(key=IntraPolicy.LEAST_VISITS, tree_fn=_tree_least_visits),
    IntraPolicyDescription(
        key=IntraPolicy.LEAST_OUTCOMES, tree_fn=_tree_least_outcomes
    ),
    IntraPolicyDescription(key=IntraPolicy.GREEDY, tree_fn=_tree_greedy),
    IntraPolicyDescription(key=IntraPolicy.MOST_VISITS, tree_fn=_tree_most_visits),
    IntraPolicyDescription(key=IntraPolicy.UCT, tree_fn=_tree_uct),
)

_DESCRIPTIONS = {d.key: d for d in INTRA_POLICY_DESCRIPTIONS}


def intra_select_tree(
    policy: IntraPolicy, members: Sequence[QNode], lam: float, rng: RandomStream
) -> QNode:
    """Pick the ground QNode the tree policy follows inside one abstract node.

    *members* share a parent and are sorted by action id.
    """
    if not members:
        raise InvariantError("intra-abstraction selection over no members")
    if len(members) == 1:
        return members[0]
    return _DESCRIPTIONS[policy].tree_fn(members, lam, rng)


def intra_select_decision(
    policy: IntraPolicy, members: Sequence[QNode], rng: RandomStream
) -> QNode:
    if not members:
        raise InvariantError("intra-abstraction decision over no members")
    if len(members) == 1:
        return members[0]
    return _DESCRIPTIONS[policy].decision_fn(members, rng)


def tree_policy_step(
    graph: SearchGraph,
    sn: StateNode,
    lam: float,
    policy: IntraPolicy,
    rng: RandomStream,
    counters: SearchCounters | None = None,
) -> QNode:
    """Expand an untried action of *sn* or descend through its abstract children.

    A freshly expanded QNode is returned with zero visits.
    """
    if sn.untried:
        action = sn.untried.pop(int(rng.integers(len(sn.untried))))
        if counters is not None:
            counters.expansions += 1
        return graph.expand(sn, action)
    abstract = select_abstract_action(sn, lam, rng)
    members = sorted(
        (q for q in abstract.members if q.parent is sn), key=lambda q: q.action
    )
    if counters is not None:
        counters.steps += 1
        if len(members) >= 2:
            counters.queried += 1
    return intra_select_tree(policy, members, lam, rng)


def root_decision(root: StateNode, policy: IntraPolicy, rng: RandomStream) -> ActionId:
    """Return the action to play at *root* after the search budget is spent."""
    visited = [q for q in root.children if q.visits > 0]
    if not visited:
        legal = sorted([q.action for q in root.children] + list(root.untried))
        if not legal:
            raise ContractViolationError(f"no legal action at terminal root {root!r}")
        return _pick(legal, rng)
    groups: dict[int, QAbstractNode] = {}
    for q in visited:
        groups.setdefault(q.abstract.id, q.abstract)
    best = _best(
        list(groups.values()), lambda a: a.agg_returns / a.agg_visits, rng
    )
    members = sorted(
        (q for q in root.children if q.abstract is best), key=lambda q: q.action
    )
    return intra_select_decision(policy, members, rng).action
