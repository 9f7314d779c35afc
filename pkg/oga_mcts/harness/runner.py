"""Episode and experiment execution with deterministic seeding and CSV output."""

from __future__ import annotations

import csv
import hashlib
import logging
import math
from collections.abc import Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from time import perf_counter
from typing import IO

import numpy as np

from ..const import CSV_COLUMNS, DEFAULT_RECENCY
from ..environments import cached_environment
from ..mdp import ActionId, MdpModel, StateKey
from ..policy import SearchCounters
from ..search import Planner, PlannerConfig
from .config import Cell, ExperimentConfig

_LOGGER = logging.getLogger(__name__)

_SEED_MASK = (1 << 63) - 1


def episode_seed(base_seed: int, cell_key: str, episode: int) -> int:
    """Derive the seed of one episode from the base seed and the cell."""
    digest = hashlib.blake2b(
        f"{cell_key}#{episode}".encode(), digest_size=8
    ).digest()
    return (int.from_bytes(digest, "big") ^ base_seed) & _SEED_MASK


@dataclass(slots=True)
class EpisodeResult:
    total_return: float = 0.0
    counters: SearchCounters = field(default_factory=SearchCounters)
    decision_ms: float = 0.0
    actions: list[ActionId] = field(default_factory=list)
    states: list[StateKey] = field(default_factory=list)


def play_episode(
    model: MdpModel,
    config: PlannerConfig,
    horizon: int,
    seed: int,
    *,
    record_timing: bool = True,
) -> EpisodeResult:
    """Play one episode, searching a fresh graph before every step."""
    rng = np.random.default_rng(seed)
    planner = Planner(model, config)
    result = EpisodeResult()
    state = model.initial_state()
    elapsed = 0.0
    for step in range(horizon):
        if model.is_terminal(state):
            break
        started = perf_counter()
        action = planner.decide(state, horizon - step, rng, result.counters)
        elapsed += perf_counter() - started
        outcome = model.sample_transition(state, action, rng)
        result.states.append(state)
        result.actions.append(action)
        result.total_return += outcome.reward
        state = outcome.successor
    if record_timing and result.actions:
        result.decision_ms = elapsed * 1000 / len(result.actions)
    return result


@dataclass(frozen=True, slots=True)
class RunRecord:
    cell_id: str
    env: str
    variant: str
    alpha: float
    eps_a: float
    eps_t: float
    p_abs: float
    pg: bool
    policy: str
    c: float
    budget: int
    seed: int
    episode_return: float
    query_ratio: float
    decision_ms: float
    action_groups: str = ""

    def as_row(self) -> list[str]:
        """Render in ``CSV_COLUMNS`` order."""
        return [
            self.cell_id,
            self.env,
            self.variant,
            _fmt(self.alpha),
            _fmt(self.eps_a),
            _fmt(self.eps_t),
            _fmt(self.p_abs),
            str(int(self.pg)),
            self.policy,
            _fmt(self.c),
            str(self.budget),
            str(self.seed),
            _fmt(self.episode_return),
            _fmt(self.query_ratio),
            _fmt(self.decision_ms),
            self.action_groups,
        ]


@dataclass(frozen=True, slots=True)
class CellFailure:
    cell_id: str
    episode: int
    seed: int
    error: str


def _fmt(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".6g")


def run_episode(
    model: MdpModel,
    cell: Cell,
    seed: int,
    *,
    recency: int = DEFAULT_RECENCY,
    record_timing: bool = True,
) -> RunRecord:
    """Play one episode of *cell* and return its CSV record."""
    agent = cell.agent
    result = play_episode(
        model,
        agent.planner(cell.budget, recency),
        cell.env.horizon,
        seed,
        record_timing=record_timing,
    )
    return RunRecord(
        cell_id=cell.cell_id,
        env=cell.env.label,
        variant=agent.variant,
        alpha=agent.alpha,
        eps_a=agent.eps_a,
        eps_t=agent.eps_t,
        p_abs=agent.p_abs,
        pg=agent.pg,
        policy=agent.policy.value,
        c=agent.c,
        budget=cell.budget,
        seed=seed,
        episode_return=result.total_return,
        query_ratio=result.counters.query_ratio,
        decision_ms=result.decision_ms,
        action_groups=agent.groups_label,
    )


def _run_cell(
    cell: Cell,
    episodes: int,
    base_seed: int,
    recency: int,
    record_timing: bool,
) -> tuple[list[RunRecord], list[CellFailure]]:
    """Run all episodes of one cell; failures are recorded, not raised."""
    started = perf_counter()
    model = cached_environment(cell.env.name, cell.env.params)
    records: list[RunRecord] = []
    failures: list[CellFailure] = []
    for episode in range(episodes):
        seed = episode_seed(base_seed, cell.key, episode)
        try:
            records.append(
                run_episode(
                    model,
                    cell,
                    seed,
                    recency=recency,
                    record_timing=record_timing,
                )
            )
        except Exception as exc:  # noqa: BLE001
            error = f"{type(exc).__name__}: {exc}"
            failures.append(CellFailure(cell.cell_id, episode, seed, error))
    _LOGGER.debug(
        "Cell finished: cell=%s, episodes=%s, failures=%s, duration_ms=%.1f",
        cell.cell_id,
        len(records),
        len(failures),
        (perf_counter() - started) * 1000,
    )
    return records, failures


def run_experiment(
    config: ExperimentConfig, failures: list[CellFailure] | None = None
) -> list[RunRecord]:
    """Run every (cell, episode) of *config*.

    Records come back in canonical (cell, episode) order regardless of the
    worker count. Failed episodes are appended to *failures* when given.
    """
    cells = config.cells()
    started = perf_counter()
    _LOGGER.info(
        "Experiment started: cells=%s, episodes=%s, workers=%s",
        len(cells),
        config.episodes,
        config.workers,
    )
    args = [
        (cell, config.episodes, config.seed, config.recency, config.record_timing)
        for cell in cells
    ]
    if config.workers == 1:
        results = [_run_cell(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_run_cell, *a) for a in args]
            results = [f.result() for f in futures]
    records: list[RunRecord] = []
    for cell_records, cell_failures in results:
        records.extend(cell_records)
        for failure in cell_failures:
            _LOGGER.warning(
                "Episode failed: cell=%s, episode=%s, seed=%s, error=%s",
                failure.cell_id,
                failure.episode,
                failure.seed,
                failure.error,
            )
        if failures is not None:
            failures.extend(cell_failures)
    _LOGGER.info(
        "Experiment finished: records=%s, duration_ms=%.1f",
        len(records),
        (perf_counter() - started) * 1000,
    )
    return records


def write_records(records: Iterable[RunRecord], out: str | Path | IO[str]) -> None:
    """Write *records* as CSV with the canonical header."""
    if isinstance(out, str | Path):
        with Path(out).open("w", encoding="utf-8", newline="") as f:
            write_records(records, f)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        writer.writerow(record.as_row())
