"""Tests for the environment catalogue and its fixtures."""

from __future__ import annotations

import math

import pytest

from oga_mcts.abstraction import (
    AbstractionConfig,
    OgaAbstraction,
    PrunedOga,
    converge_abstraction,
)
from oga_mcts.environments import (
    available_fixtures,
    build_environment,
    cached_environment,
    environment_eps_a_grid,
    load_fixture,
)
from oga_mcts.environments.chain import ChainFixture
from oga_mcts.environments.figure_one import FigureOneTree
from oga_mcts.exceptions import ConfigurationError
from oga_mcts.graph import SearchGraph


def test_catalogue_builds_the_fixtures() -> None:
    figure = build_environment("figure1")
    assert isinstance(figure, FigureOneTree)
    assert figure.enumerate_actions(figure.initial_state()) == [0, 1, 2, 3]
    chain = build_environment("chain")
    assert isinstance(chain, ChainFixture)
    assert chain.initial_state() == 1
    assert build_environment("chain", {"initial": 2}).initial_state() == 2


def test_shipped_fixtures() -> None:
    assert available_fixtures() == [
        "game_of_life_3x3",
        "navigation_3x3",
        "navigation_5x5",
        "racetrack_small",
        "sailing_5x5",
        "tireworld_triangle",
    ]
    params = load_fixture("navigation_5x5", environment="navigation")
    params["width"] = 99
    assert load_fixture("navigation_5x5")["width"] == 5


def test_fixture_keys_can_be_overridden() -> None:
    model = build_environment(
        "navigation", {"fixture": "navigation_5x5", "disappear": 0.0}
    )
    assert len(model.enumerate_outcomes((2, 0), 0)) == 1


@pytest.mark.parametrize(
    ("name", "config"),
    [
        ("chess", None),
        ("navigation", {"width": 0, "height": 3}),
        ("navigation", {"fixture": "sailing_5x5"}),
        ("navigation", {"fixture": "missing"}),
        ("figure1", {"rewards": []}),
        ("tireworld", {"start": 42}),
        ("random_mdp", {"seed": 0, "bogus": 1}),
    ],
)
def test_invalid_configurations_are_rejected(name: str, config) -> None:
    with pytest.raises(ConfigurationError):
        build_environment(name, config)


def test_cached_environment_is_shared() -> None:
    first = cached_environment("navigation", {"fixture": "navigation_3x3"})
    assert cached_environment("navigation", {"fixture": "navigation_3x3"}) is first
    assert cached_environment("navigation") is not first


def test_eps_a_grids() -> None:
    assert environment_eps_a_grid("tireworld") == (0.0, 1.0, math.inf)
    assert environment_eps_a_grid("figure1") == (0.0, 0.1, math.inf)


def test_navigation_state_count_is_bounded() -> None:
    model = build_environment("navigation")
    graph = SearchGraph(model, 4)
    graph.enumerate_full([model.initial_state()])
    assert len(graph) <= 26 * 5


@pytest.mark.parametrize("name", ["navigation", "racetrack", "sailing"])
def test_exact_abstraction_finds_symmetric_pairs(name: str) -> None:
    model = build_environment(name)
    config = AbstractionConfig(variant=PrunedOga(0.0))
    graph = SearchGraph(model, 3, hooks=OgaAbstraction(config))
    graph.enumerate_full([model.initial_state()])
    converge_abstraction(graph, config)
    sizes = [
        len(abstract.members)
        for layer in range(graph.depth)
        for abstract in graph.q_abstract_nodes(layer)
    ]
    assert max(sizes) >= 2
