"""Monte Carlo check of the row-skipping attention model.

Samples browsing sessions directly from the model's event semantics: each
row gets an independent skip decision (probability gamma) and each item an
independent continue-past decision (its continuation probability). An item
is visited when all rows above it were scanned in full or all were
skipped, and every item to its left in its own row was continued past.

The estimator is reproducible: uniforms are pre-drawn in chunks from a
seeded generator and the same draws feed either compute backend.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .browse import BrowsingModelSpec, ROW_SKIP, _grid_continuations
from .core import RelevanceJudgments
from .errors import ShapeError
from .layout import GridLayout


def simulate_row_skip(
    grid: GridLayout,
    rel: RelevanceJudgments | None,
    spec: BrowsingModelSpec,
    n_trajectories: int,
    seed: int,
    chunk_size: int = 1 << 16,
) -> tuple[np.ndarray, np.ndarray]:
    """Estimate prefix-mode row-skip weights by simulation.

    Returns (estimated weights, standard errors), one entry per displayed
    item in reading order.
    """
    if spec.adjustment != ROW_SKIP or spec.within_row != "prefix":
        raise ShapeError("simulation covers the prefix-mode row-skip model only")
    if n_trajectories < 1:
        raise ShapeError("need at least one trajectory")
    cont = _grid_continuations(grid, rel, spec)
    lens = grid.row_lengths
    n_items = grid.n_displayed
    rng = np.random.default_rng(seed)
    visits = np.zeros(n_items, dtype=np.int64)
    remaining = n_trajectories
    while remaining > 0:
        t = min(chunk_size, remaining)
        skip_u = rng.random((t, grid.n_rows))
        cont_u = rng.random((t, n_items))
        _kernels.mc_row_skip_counts(cont, lens, spec.gamma, skip_u, cont_u, visits)
        remaining -= t
    est = visits / float(n_trajectories)
    stderr = np.sqrt(est * (1.0 - est) / float(n_trajectories))
    return est, stderr
