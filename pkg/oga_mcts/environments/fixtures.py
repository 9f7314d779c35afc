"""Versioned environment parameter files shipped with the package."""

from __future__ import annotations

import copy
import json
from functools import lru_cache
from pathlib import Path
from typing import Any

from ..exceptions import ConfigurationError

_FIXTURE_DIR = Path(__file__).parent / "fixtures"

FIXTURE_VERSION = 1


def available_fixtures() -> list[str]:
    return sorted(path.stem for path in _FIXTURE_DIR.glob("*.json"))


@lru_cache(maxsize=None)
def _read_fixture(name: str) -> dict[str, Any]:
    path = _FIXTURE_DIR / f"{name}.json"
    if not path.is_file():
        raise ConfigurationError(f"unknown fixture: {name}")
    with path.open(encoding="utf-8") as f:
        data = json.load(f)
    if data.get("version") != FIXTURE_VERSION:
        raise ConfigurationError(
            f"fixture {name} has version {data.get('version')}, "
            f"expected {FIXTURE_VERSION}"
        )
    return data


def load_fixture(name: str, environment: str | None = None) -> dict[str, Any]:
    """Return a copy of the fixture's parameters.

    When *environment* is given the fixture must have been written for it.
    """
    data = _read_fixture(name)
    if environment is not None and data.get("environment") != environment:
        raise ConfigurationError(
            f"fixture {name} is for {data.get('environment')}, not {environment}"
        )
    return copy.deepcopy(data["params"])
