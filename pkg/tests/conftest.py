"""Shared fixtures for the oga-mcts tests."""

from __future__ import annotations

import numpy as np
import pytest

from oga_mcts.abstraction import AbstractionConfig, EpsilonOga, OgaAbstraction
from oga_mcts.environments import build_environment
from oga_mcts.environments.chain import ChainFixture
from oga_mcts.environments.figure_one import FigureOneTree
from oga_mcts.graph import SearchGraph
from oga_mcts.mdp import MdpModel


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def figure_one() -> FigureOneTree:
    return FigureOneTree()


@pytest.fixture
def chain() -> ChainFixture:
    return ChainFixture()


@pytest.fixture
def navigation_3x3() -> MdpModel:
    return build_environment("navigation", {"fixture": "navigation_3x3"})


@pytest.fixture
def figure_one_graph(figure_one: FigureOneTree) -> SearchGraph:
    """Fully enumerated four-action tree under (0.1, 0)-OGA."""
    config = AbstractionConfig(variant=EpsilonOga(0.1, 0.0))
    graph = SearchGraph(figure_one, 1, hooks=OgaAbstraction(config))
    graph.enumerate_full([figure_one.initial_state()])
    return graph
