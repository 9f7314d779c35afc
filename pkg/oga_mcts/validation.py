"""voluptuous helpers shared by environment and experiment schemas."""

from __future__ import annotations

import math
from collections.abc import Mapping
from typing import Any

import voluptuous as vol

from .exceptions import ConfigurationError


def bounded_int(min_value: int, max_value: int) -> vol.All:
    """Return a validator coercing to int within [min_value, max_value]."""
    return vol.All(vol.Coerce(int), vol.Range(min=min_value, max=max_value))


def bounded_float(min_value: float, max_value: float = math.inf) -> vol.All:
    return vol.All(vol.Coerce(float), vol.Range(min=min_value, max=max_value))


def probability() -> vol.All:
    return bounded_float(0.0, 1.0)


def int_pair() -> vol.All:
    """A two-integer coordinate given as a list or tuple."""
    return vol.All(vol.ExactSequence([vol.Coerce(int), vol.Coerce(int)]), tuple)


def stochastic_row(value: Any) -> list[float]:
    """Validate one probability row summing to one."""
    row = [float(p) for p in value]
    if any(p < 0.0 for p in row) or not math.isclose(sum(row), 1.0, abs_tol=1e-9):
        raise vol.Invalid(f"row does not form a distribution: {row}")
    return row


def validate(schema: vol.Schema, data: Mapping[str, Any], context: str) -> dict:
    """Run *schema* and map voluptuous errors to ``ConfigurationError``."""
    try:
        return schema(dict(data))
    except vol.MultipleInvalid as err:
        path = "/".join(str(p) for p in err.path) or "<root>"
        raise ConfigurationError(f"{context}: {err.msg} at {path}") from err
    except vol.Invalid as err:
        raise ConfigurationError(f"{context}: {err}") from err
