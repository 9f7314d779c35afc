"""Environment catalogue."""

from __future__ import annotations

import json
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import voluptuous as vol

from ..const import CONF_FIXTURE, DEFAULT_DOMAIN_EPS_AS
from ..exceptions import ConfigurationError
from ..mdp import MdpModel
from ..validation import validate
from . import (
    chain,
    figure_one,
    game_of_life,
    navigation,
    racetrack,
    random_mdp,
    sailing,
    tireworld,
)
from .fixtures import available_fixtures, load_fixture

__all__ = [
    "ENVIRONMENT_DESCRIPTIONS",
    "EnvironmentDescription",
    "available_fixtures",
    "build_environment",
    "cached_environment",
    "environment_eps_a_grid",
    "load_fixture",
]


@dataclass(frozen=True, kw_only=True)
class EnvironmentDescription:
    """Describes one catalogue entry."""

    key: str
    schema: vol.Schema
    build_fn: Callable[[dict[str, Any]], MdpModel]
    default_fixture: str | None = None
    eps_a_grid: tuple[float, ...] = DEFAULT_DOMAIN_EPS_AS


ENVIRONMENT_DESCRIPTIONS: tuple[EnvironmentDescription, ...] = (
    EnvironmentDescription(
        key="figure1",
        schema=figure_one.SCHEMA,
        build_fn=figure_one.build,
        eps_a_grid=(0.0, 0.1, math.inf),
    ),
    EnvironmentDescription(key="chain", schema=chain.SCHEMA, build_fn=chain.build),
    EnvironmentDescription(
        key="navigation",
        schema=navigation.SCHEMA,
        build_fn=navigation.build,
        default_fixture="navigation_5x5",
    ),
    EnvironmentDescription(
        key="sailing",
        schema=sailing.SCHEMA,
        build_fn=sailing.build,
        default_fixture="sailing_5x5",
    ),
    EnvironmentDescription(
        key="racetrack",
        schema=racetrack.SCHEMA,
        build_fn=racetrack.build,
        default_fixture="racetrack_small",
    ),
    EnvironmentDescription(
        key="game_of_life",
        schema=game_of_life.SCHEMA,
        build_fn=game_of_life.build,
        default_fixture="game_of_life_3x3",
    ),
    EnvironmentDescription(
        key="tireworld",
        schema=tireworld.SCHEMA,
        build_fn=tireworld.build,
        default_fixture="tireworld_triangle",
        eps_a_grid=(0.0, 1.0, math.inf),
    ),
    EnvironmentDescription(
        key="random_mdp",
        schema=random_mdp.MDP_SCHEMA,
        build_fn=random_mdp.build_mdp,
    ),
    EnvironmentDescription(
        key="random_tree",
        schema=random_mdp.TREE_SCHEMA,
        build_fn=random_mdp.build_tree,
    ),
)

_DESCRIPTIONS = {d.key: d for d in ENVIRONMENT_DESCRIPTIONS}


def _description(name: str) -> EnvironmentDescription:
    try:
        return _DESCRIPTIONS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown environment {name!r}; known: {', '.join(sorted(_DESCRIPTIONS))}"
        ) from None


def build_environment(
    name: str, config: Mapping[str, Any] | None = None
) -> MdpModel:
    """Validate *config* and build the named environment.

    ``fixture = "<name>"`` loads a shipped parameter file first; other keys
    override it. Without parameters the environment's default fixture is used.
    """
    description = _description(name)
    params = dict(config or {})
    fixture = params.pop(CONF_FIXTURE, None)
    if fixture is None and not params:
        fixture = description.default_fixture
    if fixture is not None:
        params = {**load_fixture(fixture, environment=name), **params}
    validated = validate(description.schema, params, f"environment {name}")
    try:
        return description.build_fn(validated)
    except vol.Invalid as err:
        path = "/".join(str(p) for p in err.path) or "<root>"
        raise ConfigurationError(
            f"environment {name}: {err.msg} at {path}"
        ) from err


def environment_eps_a_grid(name: str) -> tuple[float, ...]:
    return _description(name).eps_a_grid


@lru_cache(maxsize=32)
def _cached(name: str, canonical: str) -> MdpModel:
    return build_environment(name, json.loads(canonical))


def cached_environment(name: str, config: Mapping[str, Any] | None = None) -> MdpModel:
    """Build once per process for a given (name, config)."""
    return _cached(name, json.dumps(dict(config or {}), sort_keys=True))
