"""Layered directed-acyclic search graph with abstract-node bookkeeping."""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Iterable, Sequence

from .const import DEFAULT_RECENCY
from .exceptions import (
    ContractViolationError,
    InvariantError,
    ModelInconsistencyError,
    OracleInfeasibleError,
)
from .mdp import ActionId, LayeredMdp, LayeredState, MdpModel, RandomStream, StateKey
from .policy import QStatsAccumulator
from .value_guard import close, is_full_mass

GROUP_TERMINAL = "terminal"
GROUP_PARTIAL = "partial"


class StateNode:
    """A layered state in the search graph."""

    __slots__ = (
        "id",
        "layer",
        "state",
        "terminal",
        "children",
        "untried",
        "total_child_visits",
        "abstract",
        "parents",
    )

    def __init__(
        self,
        node_id: int,
        layer: int,
        state: StateKey,
        untried: list[ActionId],
        terminal: bool,
    ) -> None:
        self.id = node_id
        self.layer = layer
        self.state = state
        self.terminal = terminal
        self.children: list[QNode] = []
        self.untried = untried
        self.total_child_visits = 0
        self.abstract: StateAbstractNode | None = None
        # QNodes that sampled this node as an outcome.
        self.parents: list[QNode] = []

    @property
    def layered_state(self) -> LayeredState:
        return LayeredState(self.state, self.layer)

    @property
    def fully_expanded(self) -> bool:
        return not self.untried

    def __repr__(self) -> str:
        return f"StateNode({self.id}, layer={self.layer}, state={self.state!r})"


class QNode:
    """A state-action pair with visit count N_a and return sum V_a."""

    __slots__ = (
        "id",
        "parent",
        "action",
        "visits",
        "return_sum",
        "reward",
        "outcomes",
        "prob_mass",
        "visits_since_check",
        "checks",
        "abstract",
    )

    def __init__(self, node_id: int, parent: StateNode, action: ActionId) -> None:
        self.id = node_id
        self.parent = parent
        self.action = action
        self.visits = 0
        self.return_sum = 0.0
        self.reward: float | None = None
        # successor -> (probability, reward), insertion ordered.
        self.outcomes: dict[StateNode, tuple[float, float]] = {}
        self.prob_mass = 0.0
        self.visits_since_check = 0
        self.checks = 0
        self.abstract: QAbstractNode = None  # type: ignore[assignment]

    @property
    def layer(self) -> int:
        return self.parent.layer

    @property
    def q_value(self) -> float:
        return self.return_sum / self.visits if self.visits else 0.0

    @property
    def fully_expanded(self) -> bool:
        return is_full_mass(self.prob_mass)

    def __repr__(self) -> str:
        return f"QNode({self.id}, state={self.parent.state!r}, action={self.action})"


class QAbstractNode:
    """Equivalence class of same-layer QNodes with aggregated statistics."""

    __slots__ = ("id", "layer", "members", "agg_visits", "agg_returns")

    def __init__(self, node_id: int, layer: int) -> None:
        self.id = node_id
        self.layer = layer
        self.members: list[QNode] = []
        self.agg_visits = 0
        self.agg_returns = 0.0

    def representative(self, exclude: QNode | None = None) -> QNode | None:
        """Return the earliest-created member other than *exclude*."""
        best: QNode | None = None
        for member in self.members:
            if member is exclude:
                continue
            if best is None or member.id < best.id:
                best = member
        return best

    def __repr__(self) -> str:
        return f"QAbstractNode({self.id}, layer={self.layer}, size={len(self.members)})"


class StateAbstractNode:
    """Equivalence class of same-layer StateNodes."""

    __slots__ = ("id", "layer", "members", "kind")

    def __init__(self, node_id: int, layer: int, kind: str = "") -> None:
        self.id = node_id
        self.layer = layer
        self.members: list[StateNode] = []
        self.kind = kind

    def representative(self, exclude: StateNode | None = None) -> StateNode | None:
        best: StateNode | None = None
        for member in self.members:
            if member is exclude:
                continue
            if best is None or member.id < best.id:
                best = member
        return best

    def __repr__(self) -> str:
        return f"StateAbstractNode({self.id}, layer={self.layer}, kind={self.kind!r})"


class AbstractionHooks:
    """Callbacks through which an abstraction engine follows the graph.

    The base implementation keeps every node in its own abstract node, which
    is plain MCTS.
    """

    def bootstrap_state(self, graph: SearchGraph, node: StateNode) -> None:
        graph.move_state(node, graph.new_state_abstract(node.layer))

    def on_q_created(self, graph: SearchGraph, q: QNode) -> None:
        """Called after *q* was placed in its own singleton abstract node."""

    def on_fully_expanded(self, graph: SearchGraph, node: StateNode) -> None:
        """Called once the last untried action of *node* has been expanded."""

    def on_recency(self, graph: SearchGraph, q: QNode, rng: RandomStream) -> None:
        """Called on every K-th visit of *q*."""


class SearchGraph:
    """Layered DAG of StateNodes and QNodes with per-layer transpositions."""

    def __init__(
        self,
        model: MdpModel,
        horizon: int,
        *,
        hooks: AbstractionHooks | None = None,
        stats: QStatsAccumulator | None = None,
        recency: int = DEFAULT_RECENCY,
    ) -> None:
        self.layered = LayeredMdp(model, horizon)
        self.model = model
        self.horizon = horizon
        self.hooks = hooks if hooks is not None else AbstractionHooks()
        self.stats = stats if stats is not None else QStatsAccumulator()
        self.recency = recency
        self._states: list[dict[StateKey, StateNode]] = []
        self._qnodes: list[list[QNode]] = []
        self._q_abstract: list[dict[int, QAbstractNode]] = []
        self._s_abstract: list[dict[int, StateAbstractNode]] = []
        self._special: dict[tuple[int, str], StateAbstractNode] = {}
        self._next_state_id = 0
        self._next_q_id = 0
        self._next_abstract_id = 0

    # ------------------------------------------------------------------
    # Layer storage
    # ------------------------------------------------------------------

    def _ensure_layer(self, layer: int) -> None:
        while len(self._states) <= layer:
            self._states.append({})
            self._qnodes.append([])
            self._q_abstract.append({})
            self._s_abstract.append({})

    @property
    def depth(self) -> int:
        """Number of layers holding at least one node."""
        return len(self._states)

    def state_nodes(self, layer: int) -> list[StateNode]:
        if layer >= len(self._states):
            return []
        return list(self._states[layer].values())

    def q_nodes(self, layer: int) -> list[QNode]:
        if layer >= len(self._qnodes):
            return []
        return list(self._qnodes[layer])

    def q_abstract_nodes(self, layer: int) -> list[QAbstractNode]:
        """Abstract Q nodes of *layer* in ascending id order."""
        if layer >= len(self._q_abstract):
            return []
        return list(self._q_abstract[layer].values())

    def state_abstract_nodes(self, layer: int) -> list[StateAbstractNode]:
        if layer >= len(self._s_abstract):
            return []
        return list(self._s_abstract[layer].values())

    def find_state_node(self, layer: int, state: StateKey) -> StateNode | None:
        if layer >= len(self._states):
            return None
        return self._states[layer].get(state)

    def __len__(self) -> int:
        return sum(len(layer) for layer in self._states)

    # ------------------------------------------------------------------
    # Node creation
    # ------------------------------------------------------------------

    def get_or_create_state_node(self, layer: int, state: StateKey) -> StateNode:
        """Return the unique node of (layer, state), creating it on first use."""
        if layer > self.horizon:
            raise ContractViolationError(
                f"layer {layer} exceeds horizon {self.horizon}"
            )
        self._ensure_layer(layer)
        node = self._states[layer].get(state)
        if node is not None:
            return node
        layered = LayeredState(state, layer)
        terminal = self.layered.is_terminal(layered)
        untried = [] if terminal else list(self.layered.enumerate_actions(layered))
        node = StateNode(self._next_state_id, layer, state, untried, terminal)
        self._next_state_id += 1
        self._states[layer][state] = node
        self.hooks.bootstrap_state(self, node)
        return node

    def expand(self, node: StateNode, action: ActionId) -> QNode:
        """Create the QNode of (node, action) as a singleton abstract node.

        *action* must already have been removed from ``node.untried``.
        """
        q = QNode(self._next_q_id, node, action)
        self._next_q_id += 1
        node.children.append(q)
        self._qnodes[node.layer].append(q)
        self.move_q(q, self.new_q_abstract(node.layer))
        self.hooks.on_q_created(self, q)
        if not node.untried:
            self.hooks.on_fully_expanded(self, node)
        return q

    def record_outcome(
        self, q: QNode, successor: StateNode, probability: float, reward: float
    ) -> None:
        """Add a sampled successor to *q*; repeated outcomes are not re-counted."""
        if successor.layer != q.parent.layer + 1:
            raise InvariantError(
                f"successor layer {successor.layer} does not follow "
                f"layer {q.parent.layer}"
            )
        if q.reward is None:
            q.reward = reward
        elif not close(q.reward, reward):
            raise ModelInconsistencyError(
                f"reward of {q!r} changed from {q.reward} to {reward}"
            )
        known = q.outcomes.get(successor)
        if known is not None:
            if not (close(known[0], probability) and close(known[1], reward)):
                raise ModelInconsistencyError(
                    f"outcome {successor!r} of {q!r} re-sampled with "
                    f"(p={probability}, r={reward}), recorded (p={known[0]}, "
                    f"r={known[1]})"
                )
            return
        q.outcomes[successor] = (probability, reward)
        q.prob_mass += probability
        successor.parents.append(q)

    # ------------------------------------------------------------------
    # Abstract-node membership
    # ------------------------------------------------------------------

    def new_q_abstract(self, layer: int) -> QAbstractNode:
        self._ensure_layer(layer)
        node = QAbstractNode(self._next_abstract_id, layer)
        self._next_abstract_id += 1
        self._q_abstract[layer][node.id] = node
        return node

    def new_state_abstract(self, layer: int, kind: str = "") -> StateAbstractNode:
        self._ensure_layer(layer)
        node = StateAbstractNode(self._next_abstract_id, layer, kind)
        self._next_abstract_id += 1
        self._s_abstract[layer][node.id] = node
        return node

    def special_group(self, layer: int, kind: str) -> StateAbstractNode:
        """Return the layer's shared terminal or partial group."""
        group = self._special.get((layer, kind))
        if group is None or group.id not in self._s_abstract[layer]:
            group = self.new_state_abstract(layer, kind)
            self._special[(layer, kind)] = group
        return group

    def move_q(self, q: QNode, target: QAbstractNode) -> None:
        """Move *q* into *target*, keeping both aggregates consistent."""
        source = q.abstract
        if source is target:
            return
        if source is not None:
            source.members.remove(q)
            if source.members:
                source.agg_visits -= q.visits
                source.agg_returns = math.fsum(m.return_sum for m in source.members)
            else:
                del self._q_abstract[source.layer][source.id]
        target.members.append(q)
        target.agg_visits += q.visits
        target.agg_returns = math.fsum(m.return_sum for m in target.members)
        q.abstract = target

    def move_state(self, node: StateNode, target: StateAbstractNode) -> None:
        source = node.abstract
        if source is target:
            return
        if source is not None:
            source.members.remove(node)
            if not source.members:
                del self._s_abstract[source.layer][source.id]
        target.members.append(node)
        node.abstract = target

    # ------------------------------------------------------------------
    # Statistics
    # ------------------------------------------------------------------

    def backprop(
        self,
        path: Sequence[QNode],
        rewards: Sequence[float],
        rng: RandomStream,
    ) -> None:
        """Back up one iteration's returns along *path* (gamma = 1).

        ``rewards[i]`` is the reward collected after ``path[i]``; entries past
        the end of the path are rollout rewards. Recency checks run leaf
        first so successor abstractions settle before their parents.
        """
        tail = math.fsum(rewards[len(path) :])
        returns = [0.0] * len(path)
        running = tail
        for index in range(len(path) - 1, -1, -1):
            running += rewards[index]
            returns[index] = running
        for index in range(len(path) - 1, -1, -1):
            q = path[index]
            value = returns[index]
            q.visits += 1
            q.return_sum += value
            abstract = q.abstract
            abstract.agg_visits += 1
            abstract.agg_returns += value
            q.parent.total_child_visits += 1
            self.stats.add(q.return_sum / q.visits)
            q.visits_since_check = (q.visits_since_check + 1) % self.recency
            if q.visits_since_check == 0:
                q.checks += 1
                self.hooks.on_recency(self, q, rng)

    # ------------------------------------------------------------------
    # Full enumeration, audit and dump
    # ------------------------------------------------------------------

    def enumerate_full(
        self, roots: Iterable[StateKey], node_budget: int = 200_000
    ) -> list[StateNode]:
        """Expand every action and record every outcome reachable from *roots*.

        Roots are placed at layer 0. Raises ``OracleInfeasibleError`` when
        more than *node_budget* state nodes would be created.
        """
        root_nodes = [self.get_or_create_state_node(0, root) for root in roots]
        queue: deque[StateNode] = deque(root_nodes)
        seen = {node.id for node in root_nodes}
        while queue:
            node = queue.popleft()
            while node.untried:
                action = node.untried.pop(0)
                q = self.expand(node, action)
                for succ, probability, reward in self.layered.enumerate_outcomes(
                    node.layered_state, action
                ):
                    child = self.get_or_create_state_node(succ.layer, succ.state)
                    self.record_outcome(q, child, probability, reward)
                    if child.id not in seen:
                        seen.add(child.id)
                        queue.append(child)
                        if len(seen) > node_budget:
                            raise OracleInfeasibleError(
                                f"graph enumeration exceeded {node_budget} nodes"
                            )
        return root_nodes

    def abstract_stats(self, abstract: QAbstractNode) -> tuple[int, float]:
        """Return the aggregated (visits, returns) of *abstract*."""
        if not abstract.members:
            raise InvariantError(f"{abstract!r} has no members")
        return abstract.agg_visits, abstract.agg_returns

    def audit(self) -> None:
        """Check partition, aggregate and DAG invariants over the whole graph.

        Raises ``InvariantError`` describing the first violation.
        """
        for layer in range(self.depth):
            qnodes = self._qnodes[layer]
            covered: set[int] = set()
            for abstract in self._q_abstract[layer].values():
                if not abstract.members:
                    raise InvariantError(f"{abstract!r} is empty")
                for q in abstract.members:
                    if q.abstract is not abstract or q.layer != layer:
                        raise InvariantError(f"{q!r} misplaced in {abstract!r}")
                    if q.id in covered:
                        raise InvariantError(f"{q!r} in two abstract nodes")
                    covered.add(q.id)
                visits = sum(q.visits for q in abstract.members)
                returns = math.fsum(q.return_sum for q in abstract.members)
                if visits != abstract.agg_visits or not math.isclose(
                    returns, abstract.agg_returns, rel_tol=1e-9, abs_tol=1e-9
                ):
                    raise InvariantError(f"stale aggregates on {abstract!r}")
            if covered != {q.id for q in qnodes}:
                raise InvariantError(f"layer {layer} QNodes are not partitioned")

            states = self._states[layer].values()
            covered = set()
            for group in self._s_abstract[layer].values():
                expanded = {node.fully_expanded for node in group.members}
                if group.kind != GROUP_TERMINAL and len(expanded) > 1:
                    raise InvariantError(
                        f"{group!r} mixes fully and partially expanded states"
                    )
                for node in group.members:
                    if node.abstract is not group or node.layer != layer:
                        raise InvariantError(f"{node!r} misplaced in {group!r}")
                    covered.add(node.id)
            if covered != {node.id for node in states}:
                raise InvariantError(f"layer {layer} states are not partitioned")

            for node in states:
                if node.total_child_visits != sum(q.visits for q in node.children):
                    raise InvariantError(f"child visit total of {node!r} is stale")
                for q in node.children:
                    for succ in q.outcomes:
                        if succ.layer != layer + 1:
                            raise InvariantError(f"edge {q!r} -> {succ!r} skips")
                    if q.prob_mass > 1.0 + 1e-9:
                        raise InvariantError(f"{q!r} outcome mass above one")

    def dump(self) -> str:
        """Render the abstraction partition as line-oriented text.

        ``Q <id> <layer> <state>:<action> ...`` for abstract Q nodes and
        ``S <id> <layer> <kind> <state> ...`` for abstract state nodes.
        """
        lines: list[str] = []
        for layer in range(self.depth):
            for abstract in self._q_abstract[layer].values():
                members = " ".join(
                    f"{q.parent.state!r}:{q.action}"
                    for q in sorted(abstract.members, key=lambda m: m.id)
                )
                lines.append(f"Q {abstract.id} {layer} {members}")
            for group in self._s_abstract[layer].values():
                members = " ".join(
                    repr(node.state)
                    for node in sorted(group.members, key=lambda n: n.id)
                )
                lines.append(f"S {group.id} {layer} {group.kind or '-'} {members}")
        return "\n".join(lines) + "\n"
