"""Accuracy windows, correlation, chance baseline, and cross-entropy."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import stats

from .series import LabelSeries

WINDOWS = ("overall", "last_quarter")


class EmptyWindowError(ValueError):
    """Every object in the requested window was excluded."""


class ZeroVarianceError(ValueError):
    """Correlation is undefined because one of the vectors is constant."""


def last_quarter_count(n_objects: int) -> int:
    """Objects in the last-quarter window: the final ceil(N/4)."""
    return -(-n_objects // 4)


def accuracy(series: LabelSeries, window: str = "overall") -> float:
    """Proportion of correct model labels over the window.

    The window is cut over all objects in presentation order first;
    excluded objects are then dropped from both numerator and denominator.
    """
    if window not in WINDOWS:
        raise ValueError(f"window must be one of {WINDOWS}, got {window!r}")
    records = series.records
    if window == "last_quarter":
        records = records[len(records) - last_quarter_count(len(records)):]
    attempted = [r for r in records if r.model is not None]
    if not attempted:
        raise EmptyWindowError(f"no labeled objects in the {window} window")
    return sum(r.model == r.gold for r in attempted) / len(attempted)


def pearson_r(model: Sequence[float], human: Sequence[float]) -> float:
    """Signed Pearson correlation; pairs with a missing human value are
    dropped before computing."""
    xs, ys = _paired(model, human)
    if np.ptp(xs) == 0.0 or np.ptp(ys) == 0.0:
        raise ZeroVarianceError("one of the vectors is constant")
    return float(stats.pearsonr(xs, ys).statistic)


def r_squared(model: Sequence[float], human: Sequence[float]) -> float:
    """Square of the Pearson correlation (anticorrelation also scores 1;
    report :func:`pearson_r` alongside to disambiguate)."""
    r = pearson_r(model, human)
    return r * r


def _paired(model: Sequence[float], human: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    if len(model) != len(human):
        raise ValueError("vectors must be aligned by object")
    pairs = [(m, h) for m, h in zip(model, human) if h is not None and m is not None]
    if len(pairs) < 2:
        raise ValueError("need at least two aligned pairs")
    xs = np.array([m for m, _h in pairs], dtype=float)
    ys = np.array([h for _m, h in pairs], dtype=float)
    return xs, ys


def chance_baseline(p: float) -> float:
    """Expected accuracy of guessing True at empirical rate ``p``:
    p^2 + (1-p)^2."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    # Algebraically identical form; rounds exactly at simple rates like 0.8.
    return 1.0 - 2.0 * p * (1.0 - p)


def cross_entropy(p_true: float, q_true: float) -> float:
    """Cross-entropy (nats) between two distributions over {True, False},
    each given by its True probability.

    Returns inf when the model assigns zero mass to a label the target
    gives positive mass.
    """
    for name, value in (("p_true", p_true), ("q_true", q_true)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
    total = 0.0
    for p, q in ((p_true, q_true), (1.0 - p_true, 1.0 - q_true)):
        if p == 0.0:
            continue
        if q == 0.0:
            return float("inf")
        total -= p * math.log(q)
    return total


def cross_entropy_series(pairs: Sequence[tuple[float, float]]) -> float:
    """Sum of per-object cross-entropies over (target, model) True-probability
    pairs."""
    return sum(cross_entropy(p, q) for p, q in pairs)
