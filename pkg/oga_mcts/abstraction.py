"""On-the-go abstraction engines over a SearchGraph.

Q nodes are grouped when their rewards and their transition distributions over
the successor layer's state abstraction agree (exactly, or within eps_a and
eps_t). State nodes are grouped when their sets of abstract actions agree.
Changes propagate synchronously toward the root.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .const import DEFAULT_CONVERGE_MAX_SWEEPS, DEFAULT_RECENCY, MAX_EPS_T
from .exceptions import ConfigurationError
from .graph import (
    GROUP_PARTIAL,
    GROUP_TERMINAL,
    AbstractionHooks,
    QAbstractNode,
    QNode,
    SearchGraph,
    StateAbstractNode,
    StateNode,
)
from .mdp import ActionId, RandomStream, StateKey
from .value_guard import close, within

_LOGGER = logging.getLogger(__name__)

QLabelKey = tuple[int, StateKey, ActionId]
"""(layer, state, action) identifying a QNode across graphs."""

FrozenPartition = Mapping[QLabelKey, int]


# ----------------------------------------------------------------------
# Configuration
# ----------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PrunedOga:
    """Exact grouping over outcomes with p > alpha * max p."""

    alpha: float = 0.0


@dataclass(frozen=True, slots=True)
class EpsilonOga:
    """Grouping tolerating reward gaps <= eps_a and divergence <= eps_t."""

    eps_a: float = 0.0
    eps_t: float = 0.0


@dataclass(frozen=True, slots=True)
class RandomOga:
    """Singleton Q nodes join a random same-layer abstract node with p_abs."""

    p_abs: float = 0.0


@dataclass(frozen=True, slots=True)
class FixedPartition:
    """A frozen grouping: same-parent action groups or a partition snapshot."""

    action_groups: tuple[tuple[ActionId, ...], ...] = ()
    labels: FrozenPartition | None = field(default=None, compare=False)


Variant = PrunedOga | EpsilonOga | RandomOga | FixedPartition


@dataclass(frozen=True, slots=True)
class AbstractionConfig:
    variant: Variant = field(default_factory=PrunedOga)
    pg: bool = False
    recency: int = DEFAULT_RECENCY

    def __post_init__(self) -> None:
        if self.recency < 1:
            raise ConfigurationError(f"recency must be >= 1: {self.recency}")
        variant = self.variant
        if isinstance(variant, PrunedOga) and not 0.0 <= variant.alpha <= 1.0:
            raise ConfigurationError(f"alpha out of [0, 1]: {variant.alpha}")
        if isinstance(variant, EpsilonOga):
            if not variant.eps_a >= 0.0:
                raise ConfigurationError(f"eps_a must be >= 0: {variant.eps_a}")
            if not 0.0 <= variant.eps_t <= MAX_EPS_T:
                raise ConfigurationError(f"eps_t out of [0, 2]: {variant.eps_t}")
        if isinstance(variant, RandomOga) and not 0.0 <= variant.p_abs <= 1.0:
            raise ConfigurationError(f"p_abs out of [0, 1]: {variant.p_abs}")

    @property
    def alpha(self) -> float:
        return self.variant.alpha if isinstance(self.variant, PrunedOga) else 0.0

    @property
    def eps_a(self) -> float:
        return self.variant.eps_a if isinstance(self.variant, EpsilonOga) else 0.0

    @property
    def eps_t(self) -> float:
        return self.variant.eps_t if isinstance(self.variant, EpsilonOga) else 0.0

    @property
    def exact(self) -> bool:
        """True when compatibility is signature equality."""
        return self.eps_a == 0.0 and self.eps_t == 0.0


# ----------------------------------------------------------------------
# Compatibility
# ----------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class QSignature:
    """Reward plus the abstracted pruned transition distribution of a QNode."""

    reward: float | None
    successors: tuple[tuple[int, float], ...]

    def matches(self, other: QSignature) -> bool:
        if self.reward is None or other.reward is None:
            return False
        if not close(self.reward, other.reward):
            return False
        if len(self.successors) != len(other.successors):
            return False
        return all(
            a_id == b_id and close(a_p, b_p)
            for (a_id, a_p), (b_id, b_p) in zip(
                self.successors, other.successors, strict=True
            )
        )


def prune_outcomes(
    outcomes: Sequence[tuple[StateNode, float]], alpha: float
) -> list[tuple[StateNode, float]]:
    """Keep the outcomes whose probability exceeds alpha times the largest one."""
    if not outcomes:
        return []
    threshold = alpha * max(p for _, p in outcomes)
    return [(succ, p) for succ, p in outcomes if p > threshold]


def _class_masses(q: QNode, alpha: float) -> dict[int, float]:
    pruned = prune_outcomes([(s, p) for s, (p, _) in q.outcomes.items()], alpha)
    masses: dict[int, float] = {}
    for succ, p in pruned:
        key = succ.abstract.id  # type: ignore[union-attr]
        masses[key] = masses.get(key, 0.0) + p
    return masses


def q_signature(q: QNode, alpha: float = 0.0) -> QSignature:
    return QSignature(q.reward, tuple(sorted(_class_masses(q, alpha).items())))


def transition_divergence(q1: QNode, q2: QNode, alpha: float = 0.0) -> float:
    """Sum over successor classes of the absolute difference in class mass.

    Classes are the successor layer's state abstraction at call time; only
    sampled, pruned outcomes contribute.
    """
    m1 = _class_masses(q1, alpha)
    m2 = _class_masses(q2, alpha)
    return math.fsum(abs(m1.get(k, 0.0) - m2.get(k, 0.0)) for k in m1.keys() | m2)


def q_compatible(q1: QNode, q2: QNode, config: AbstractionConfig) -> bool:
    if q1 is q2:
        return True
    if q1.reward is None or q2.reward is None:
        return False
    if config.exact:
        return q_signature(q1, config.alpha).matches(q_signature(q2, config.alpha))
    if not within(abs(q1.reward - q2.reward), config.eps_a):
        return False
    return within(transition_divergence(q1, q2, config.alpha), config.eps_t)


# ----------------------------------------------------------------------
# Incremental updates
# ----------------------------------------------------------------------


def update_q_abstraction(
    q: QNode, graph: SearchGraph, config: AbstractionConfig
) -> bool:
    """Move *q* into the first compatible abstract node of its layer.

    Candidates are scanned in ascending id and compared through their
    earliest-created member other than *q*. Without a compatible candidate
    *q* ends up alone. Returns True when membership changed.
    """
    current = q.abstract
    target: QAbstractNode | None = None
    own_signature = q_signature(q, config.alpha) if config.exact else None
    for candidate in graph.q_abstract_nodes(q.layer):
        representative = candidate.representative(exclude=q)
        if representative is None:
            continue
        if own_signature is not None:
            if representative.reward is None or q.reward is None:
                continue
            if not close(representative.reward, q.reward):
                continue
            compatible = own_signature.matches(
                q_signature(representative, config.alpha)
            )
        else:
            compatible = q_compatible(q, representative, config)
        if compatible:
            target = candidate
            break
    if target is None:
        if len(current.members) == 1:
            return False
        target = graph.new_q_abstract(q.layer)
    if target is current:
        return False
    graph.move_q(q, target)
    update_state_abstraction(q.parent, graph, config)
    return True


def _action_key(sn: StateNode) -> frozenset[int]:
    return frozenset(q.abstract.id for q in sn.children)


def update_state_abstraction(
    sn: StateNode, graph: SearchGraph, config: AbstractionConfig
) -> bool:
    """Regroup *sn* and re-check the QNodes leading to it on change."""
    current = sn.abstract
    alone = (
        current is not None and current.kind == "" and current.members == [sn]
    )
    target: StateAbstractNode | None = None
    if sn.terminal:
        target = graph.special_group(sn.layer, GROUP_TERMINAL)
    elif not sn.fully_expanded:
        if config.pg:
            target = graph.special_group(sn.layer, GROUP_PARTIAL)
        elif alone:
            target = current
    else:
        key = _action_key(sn)
        for group in graph.state_abstract_nodes(sn.layer):
            if group.kind:
                continue
            representative = group.representative(exclude=sn)
            if representative is None or not representative.fully_expanded:
                continue
            if _action_key(representative) == key:
                target = group
                break
        if target is None and alone:
            target = current
    if target is None:
        target = graph.new_state_abstract(sn.layer)
    if target is current:
        return False
    graph.move_state(sn, target)
    for q in list(sn.parents):
        update_q_abstraction(q, graph, config)
    return True


def random_oga_update(
    q: QNode, graph: SearchGraph, p_abs: float, rng: RandomStream
) -> None:
    """With probability p_abs, move a singleton *q* into a random layer node.

    The draw is uniform over every abstract node of the layer, its own
    included; drawing its own node leaves *q* alone.
    """
    if len(q.abstract.members) != 1:
        return
    if rng.random() >= p_abs:
        return
    candidates = graph.q_abstract_nodes(q.layer)
    graph.move_q(q, candidates[int(rng.integers(len(candidates)))])


@dataclass(frozen=True, slots=True)
class Partition:
    """Snapshot of the graph's abstraction: groups of node labels per layer."""

    q_groups: tuple[frozenset[QLabelKey], ...]
    state_groups: tuple[frozenset[tuple[int, StateKey]], ...]

    def state_groups_at(self, layer: int) -> set[frozenset[StateKey]]:
        return {
            frozenset(state for _, state in group)
            for group in self.state_groups
            if next(iter(group))[0] == layer
        }


def partition_of(graph: SearchGraph) -> Partition:
    q_groups: list[frozenset[QLabelKey]] = []
    state_groups: list[frozenset[tuple[int, StateKey]]] = []
    for layer in range(graph.depth):
        for abstract in graph.q_abstract_nodes(layer):
            q_groups.append(
                frozenset((layer, q.parent.state, q.action) for q in abstract.members)
            )
        for group in graph.state_abstract_nodes(layer):
            state_groups.append(frozenset((layer, n.state) for n in group.members))
    return Partition(tuple(q_groups), tuple(state_groups))


def converge_abstraction(
    graph: SearchGraph,
    config: AbstractionConfig,
    max_sweeps: int = DEFAULT_CONVERGE_MAX_SWEEPS,
) -> Partition:
    """Sweep the graph bottom-up until no update changes the partition."""
    for sweep in range(1, max_sweeps + 1):
        changed = False
        for layer in range(graph.depth - 1, -1, -1):
            for q in graph.q_nodes(layer):
                changed |= update_q_abstraction(q, graph, config)
            for sn in graph.state_nodes(layer):
                changed |= update_state_abstraction(sn, graph, config)
        if not changed:
            _LOGGER.debug("Abstraction converged: sweeps=%s", sweep)
            return partition_of(graph)
    _LOGGER.warning(
        "Abstraction did not converge: max_sweeps=%s, nodes=%s",
        max_sweeps,
        len(graph),
    )
    return partition_of(graph)


def freeze_partition(graph: SearchGraph) -> dict[QLabelKey, int]:
    """Label every QNode with its abstract node id for FixedPartition replay."""
    return {
        (layer, q.parent.state, q.action): q.abstract.id
        for layer in range(graph.depth)
        for q in graph.q_nodes(layer)
    }


# ----------------------------------------------------------------------
# Engines
# ----------------------------------------------------------------------


class OgaAbstraction(AbstractionHooks):
    """Pruned and (eps_a, eps_t) OGA with optional partial grouping."""

    def __init__(self, config: AbstractionConfig) -> None:
        self.config = config

    def bootstrap_state(self, graph: SearchGraph, node: StateNode) -> None:
        update_state_abstraction(node, graph, self.config)

    def on_fully_expanded(self, graph: SearchGraph, node: StateNode) -> None:
        update_state_abstraction(node, graph, self.config)

    def on_recency(self, graph: SearchGraph, q: QNode, rng: RandomStream) -> None:
        update_q_abstraction(q, graph, self.config)


class RandomOgaAbstraction(AbstractionHooks):
    def __init__(self, p_abs: float) -> None:
        self.p_abs = p_abs

    def on_recency(self, graph: SearchGraph, q: QNode, rng: RandomStream) -> None:
        random_oga_update(q, graph, self.p_abs, rng)


class FixedPartitionAbstraction(AbstractionHooks):
    """Places each new QNode into a group fixed before the search starts.

    ``action_groups`` groups same-parent actions; ``labels`` replays a
    partition taken with ``freeze_partition``. Unlisted QNodes stay alone.
    """

    def __init__(
        self,
        action_groups: Iterable[Iterable[ActionId]] = (),
        labels: FrozenPartition | None = None,
    ) -> None:
        self._action_group = {
            action: index
            for index, group in enumerate(action_groups)
            for action in group
        }
        self._labels = labels
        self._groups: dict[tuple[object, ...], QAbstractNode] = {}

    def _group_key(self, q: QNode) -> tuple[object, ...] | None:
        if self._labels is not None:
            label = self._labels.get((q.layer, q.parent.state, q.action))
            return None if label is None else ("label", q.layer, label)
        index = self._action_group.get(q.action)
        return None if index is None else ("action", q.parent.id, index)

    def on_q_created(self, graph: SearchGraph, q: QNode) -> None:
        key = self._group_key(q)
        if key is None:
            return
        group = self._groups.get(key)
        if group is None or not group.members:
            self._groups[key] = q.abstract
        else:
            graph.move_q(q, group)


def build_engine(config: AbstractionConfig | None) -> AbstractionHooks:
    """Return the hooks implementing *config*; None means plain MCTS."""
    if config is None:
        return AbstractionHooks()
    variant = config.variant
    if isinstance(variant, RandomOga):
        return RandomOgaAbstraction(variant.p_abs)
    if isinstance(variant, FixedPartition):
        return FixedPartitionAbstraction(variant.action_groups, variant.labels)
    return OgaAbstraction(config)
