"""User attention models over rendered layouts.

Two base models estimate the probability that a user examines each
displayed position: ``geometric`` (attention decays by a constant
continuation probability per position) and ``cascade`` (the continuation
probability after each item shrinks with that item's relevance, since
satisfied users stop). Two grid adjustments modify the bases:

* ``row-skip``: users may jump over whole rows with probability gamma;
* ``slow-decay``: attention decays more slowly across a row, modeled as a
  per-row boost (beta to the row index) capped at probability 1.

All weights are probabilities: every model clamps to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import RelevanceJudgments
from .errors import ShapeError
from .layout import GridLayout

GEOMETRIC = "geometric"
CASCADE = "cascade"
BASES = (GEOMETRIC, CASCADE)

ADJUST_NONE = "none"
ROW_SKIP = "row-skip"
SLOW_DECAY = "slow-decay"
ADJUSTMENTS = (ADJUST_NONE, ROW_SKIP, SLOW_DECAY)

WITHIN_ROW_MODES = ("prefix", "full")


@dataclass(frozen=True)
class BrowsingModelSpec:
    """Parameters of one attention model.

    ``satisfaction`` scales how strongly relevance cuts the cascade
    continuation probability (0 disables relevance entirely).
    ``relevance_cap`` normalizes grades into [0, 1]; when None, the
    largest grade present in the inputs at hand is used.
    ``within_row`` controls row-skip attention inside a reached row:
    ``prefix`` decays item by item, ``full`` charges the whole row's
    continuation product uniformly.
    """

    base: str = GEOMETRIC
    adjustment: str = ADJUST_NONE
    alpha: float = 0.5
    gamma: float = 0.5
    beta: float = 1.9
    satisfaction: float = 0.5
    within_row: str = "prefix"
    relevance_cap: float | None = None

    def __post_init__(self):
        if self.base not in BASES:
            raise ShapeError(f"unknown base model {self.base!r}")
        if self.adjustment not in ADJUSTMENTS:
            raise ShapeError(f"unknown adjustment {self.adjustment!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ShapeError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ShapeError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.beta < 1.0:
            raise ShapeError(f"beta must be >= 1, got {self.beta}")
        if not 0.0 <= self.satisfaction <= 1.0:
            raise ShapeError(f"satisfaction must be in [0, 1], got {self.satisfaction}")
        if self.within_row not in WITHIN_ROW_MODES:
            raise ShapeError(f"unknown within-row mode {self.within_row!r}")
        if self.relevance_cap is not None and self.relevance_cap <= 0:
            raise ShapeError("relevance cap must be positive")


def resolve_cap(spec: BrowsingModelSpec, grades: np.ndarray) -> float:
    """Grade ceiling used to normalize relevance into [0, 1]."""
    if spec.relevance_cap is not None:
        return spec.relevance_cap
    top = float(np.max(grades)) if np.size(grades) else 0.0
    return top if top > 0 else 1.0


def continuation(grade: float, spec: BrowsingModelSpec, cap: float | None = None) -> float:
    """Probability of moving past an item with the given relevance grade.

    Geometric browsing continues with constant probability alpha; cascade
    scales it down to alpha * (1 - satisfaction * normalized grade), so a
    maximally relevant item is the most likely stopping point.
    """
    if spec.base == GEOMETRIC:
        return spec.alpha
    if cap is None:
        cap = resolve_cap(spec, np.array([grade]))
    capped = min(grade / cap, 1.0)
    return spec.alpha * (1.0 - spec.satisfaction * capped)


def continuations(grades: np.ndarray, spec: BrowsingModelSpec) -> np.ndarray:
    """Vector of continuation probabilities for the given grades."""
    grades = np.asarray(grades, dtype=np.float64)
    if spec.base == GEOMETRIC:
        return np.full(grades.shape, spec.alpha)
    cap = resolve_cap(spec, grades)
    capped = np.minimum(grades / cap, 1.0)
    return spec.alpha * (1.0 - spec.satisfaction * capped)


def _grid_continuations(
    grid: GridLayout, rel: RelevanceJudgments | None, spec: BrowsingModelSpec
) -> np.ndarray:
    if spec.base == GEOMETRIC or rel is None:
        return np.full(grid.n_displayed, spec.alpha)
    grades = rel.grades(grid.origin.request, grid.items)
    return continuations(grades, spec)


def attention_base(
    grid: GridLayout, rel: RelevanceJudgments | None, spec: BrowsingModelSpec
) -> np.ndarray:
    """Unadjusted attention: the product of continuations of everything
    read before each position (geometric reduces to alpha**rank)."""
    cont = _grid_continuations(grid, rel, spec)
    return _kernels.base_weights(cont)


def attention_row_skip(
    grid: GridLayout, rel: RelevanceJudgments | None, spec: BrowsingModelSpec
) -> np.ndarray:
    """Row-skipping attention.

    A row is reached when the user scanned every earlier row to its end or
    skipped all of them; the top row is always reached. gamma=0 with
    prefix mode recovers the unadjusted model on any geometry.
    """
    cont = _grid_continuations(grid, rel, spec)
    return _kernels.row_skip_weights(
        cont, grid.row_lengths, spec.gamma, spec.within_row == "prefix"
    )


def attention_slow_decay(
    grid: GridLayout, rel: RelevanceJudgments | None, spec: BrowsingModelSpec
) -> np.ndarray:
    """Slower-decay attention: unadjusted weight boosted by beta**row,
    capped at 1. beta=1 recovers the unadjusted model exactly."""
    cont = _grid_continuations(grid, rel, spec)
    return _kernels.slow_decay_weights(cont, grid.row_lengths, spec.beta)


def attention(
    grid: GridLayout, rel: RelevanceJudgments | None, spec: BrowsingModelSpec
) -> np.ndarray:
    """Attention weights of the displayed items, in reading order."""
    if spec.adjustment == ROW_SKIP:
        return attention_row_skip(grid, rel, spec)
    if spec.adjustment == SLOW_DECAY:
        return attention_slow_decay(grid, rel, spec)
    return attention_base(grid, rel, spec)
