"""Value guard helpers for floating-point model data."""

from __future__ import annotations

from collections.abc import Iterable

from .const import ABS_TOL


def close(a: float, b: float, tol: float = ABS_TOL) -> bool:
    """Return True when *a* and *b* agree within the absolute tolerance."""
    return abs(a - b) <= tol


def within(value: float, bound: float, tol: float = ABS_TOL) -> bool:
    """Return True when *value* <= *bound* up to the absolute tolerance.

    Threshold tests such as ``|r1 - r2| <= eps_a`` go through here so that
    e.g. ``1.1 - 1.0`` is accepted against ``eps_a = 0.1``.
    """
    return value <= bound + tol


def is_normalized(probabilities: Iterable[float], tol: float = ABS_TOL) -> bool:
    """Return True when the probabilities sum to one within tolerance."""
    return close(sum(probabilities), 1.0, tol)


def is_full_mass(mass: float, tol: float = ABS_TOL) -> bool:
    """Return True when a sampled probability mass covers the full support."""
    return mass >= 1.0 - tol
