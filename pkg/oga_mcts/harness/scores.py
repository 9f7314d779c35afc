"""Borda-like cross-task scores and confidence intervals.

``perf`` is an (n agents x m tasks) matrix of mean returns, larger is better.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from ..const import CI_Z_99
from ..exceptions import ScoreInputError


@dataclass(frozen=True, slots=True)
class ScoreMatrix:
    """Pairwise matrix M (antisymmetric, zero diagonal) and per-agent scores."""

    matrix: np.ndarray
    scores: np.ndarray


def _validate(perf: np.ndarray | Iterable[Iterable[float]]) -> np.ndarray:
    matrix = np.asarray(perf, dtype=float)
    if matrix.ndim != 2:
        raise ScoreInputError(f"performance matrix must be 2-D, got {matrix.shape}")
    n, m = matrix.shape
    if n < 2 or m < 2:
        raise ScoreInputError(f"need at least 2 agents and 2 tasks, got {n}x{m}")
    if not np.all(np.isfinite(matrix)):
        raise ScoreInputError("performance matrix contains non-finite values")
    return matrix


def _row_scores(matrix: np.ndarray) -> np.ndarray:
    n = matrix.shape[0]
    return (matrix.sum(axis=1) - np.diag(matrix)) / (n - 1)


def pairings_score(perf: np.ndarray | Iterable[Iterable[float]]) -> ScoreMatrix:
    """Sign-count score.

    M[i, j] = sum_k sgn(p_ik - p_jk) / (m - 1) and
    s_i = sum_{l != i} M[i, l] / (n - 1).
    """
    p = _validate(perf)
    m = p.shape[1]
    diff = p[:, None, :] - p[None, :, :]
    matrix = np.sign(diff).sum(axis=2) / (m - 1)
    return ScoreMatrix(matrix=matrix, scores=_row_scores(matrix))


def relative_improvement_score(
    perf: np.ndarray | Iterable[Iterable[float]],
) -> ScoreMatrix:
    """Like ``pairings_score`` with sgn replaced by the relative difference.

    The term for task k is (p_ik - p_jk) / max(|p_ik|, |p_jk|), and 0 when both
    performances are 0.
    """
    p = _validate(perf)
    m = p.shape[1]
    diff = p[:, None, :] - p[None, :, :]
    scale = np.maximum(np.abs(p)[:, None, :], np.abs(p)[None, :, :])
    terms = np.divide(diff, scale, out=np.zeros_like(diff), where=scale != 0.0)
    matrix = terms.sum(axis=2) / (m - 1)
    return ScoreMatrix(matrix=matrix, scores=_row_scores(matrix))


def confidence_interval(
    samples: Iterable[float], z: float = CI_Z_99
) -> tuple[float, float]:
    """Return (mean, z * sample std / sqrt(count))."""
    values = np.asarray(list(samples), dtype=float)
    if values.size < 2:
        raise ScoreInputError(f"need at least 2 samples, got {values.size}")
    half_width = z * float(values.std(ddof=1)) / np.sqrt(values.size)
    return float(values.mean()), float(half_width)
