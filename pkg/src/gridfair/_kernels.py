"""Numeric kernels for attention weights and browsing simulation.

Two interchangeable backends are provided: plain numpy, and numba-compiled
loops for the hot paths (parameter sweeps and Monte Carlo simulation). The
active backend is chosen at import time from the ``GRIDFAIR_BACKEND``
environment variable: ``numba`` (default when numba is importable),
``numpy``, or ``auto``.

Both backends perform floating-point operations in the same order, so for
identical inputs they produce identical results bit for bit; the Monte
Carlo kernels consume pre-drawn uniforms for the same reason.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency normally
    HAS_NUMBA = False


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _base_weights_numpy(cont):
    """w[i] = product of continuation over items strictly before rank i."""
    n = cont.shape[0]
    out = np.empty(n)
    if n == 0:
        return out
    out[0] = 1.0
    if n > 1:
        np.cumprod(cont[:-1], out=out[1:])
    np.clip(out, 0.0, 1.0, out=out)
    return out


def _row_skip_weights_numpy(cont, row_lengths, gamma, prefix):
    """Row-skipping weights.

    The probability of reaching row r is the chance the user either
    scanned every earlier row to completion or skipped every earlier row;
    the first row is always reached. Within a reached row, ``prefix``
    multiplies in the continuations of the items already passed, while
    full mode charges the whole row's product to every item in it.
    """
    n = cont.shape[0]
    out = np.empty(n)
    scan = 1.0
    skip = 1.0
    pos = 0
    for r in range(row_lengths.shape[0]):
        ln = int(row_lengths[r])
        reach = 1.0 if r == 0 else scan + skip
        row_prod = 1.0
        if prefix:
            w = 1.0
            for j in range(ln):
                out[pos + j] = reach * w
                w *= cont[pos + j]
            row_prod = w
        else:
            for j in range(ln):
                row_prod *= cont[pos + j]
            out[pos : pos + ln] = reach * row_prod
        scan *= (1.0 - gamma) * row_prod
        skip *= gamma
        pos += ln
    np.clip(out, 0.0, 1.0, out=out)
    return out


def _slow_decay_weights_py(cont, row_lengths, beta):
    """min(beta**row x plain decayed weight, 1) per item.

    Kept as one running product (boost and continuations interleaved in
    reading order) so extreme inputs saturate instead of overflowing: a
    huge boost against a vanishing tail clamps to 1, and a hard-zero
    continuation zeroes everything after it.
    """
    n = cont.shape[0]
    out = np.empty(n)
    v = 1.0
    pos = 0
    for r in range(row_lengths.shape[0]):
        if r > 0:
            v *= beta
        for j in range(row_lengths[r]):
            val = v
            if val > 1.0:
                val = 1.0
            if val < 0.0:
                val = 0.0
            out[pos + j] = val
            v *= cont[pos + j]
            if v != v:  # inf boost times zero continuation: the zero wins
                v = 0.0
        pos += row_lengths[r]
    return out


def _mc_row_skip_counts_numpy(cont, row_lengths, gamma, skip_u, cont_u, visits):
    """Accumulate visit counts for one chunk of sampled browsing sessions.

    ``skip_u`` is (trajectories, rows) and ``cont_u`` (trajectories, items),
    both uniform in [0, 1). A row is skipped when its draw falls below
    gamma; an item is continued past when its draw falls below its
    continuation probability. An item is visited when all earlier rows
    were scanned fully or all were skipped, and every item before it in
    its own row was continued past.
    """
    nrows = row_lengths.shape[0]
    skipped = skip_u < gamma
    continued = cont_u < cont[None, :]

    starts = np.zeros(nrows, dtype=np.int64)
    np.cumsum(row_lengths[:-1], out=starts[1:])

    t = skip_u.shape[0]
    row_full = np.empty((t, nrows), dtype=bool)
    for r in range(nrows):
        s, ln = starts[r], int(row_lengths[r])
        row_full[:, r] = continued[:, s : s + ln].all(axis=1)
    scanned_fully = ~skipped & row_full

    all_scan = np.ones((t, nrows), dtype=bool)
    all_skip = np.ones((t, nrows), dtype=bool)
    if nrows > 1:
        np.logical_and.accumulate(scanned_fully[:, :-1], axis=1, out=all_scan[:, 1:])
        np.logical_and.accumulate(skipped[:, :-1], axis=1, out=all_skip[:, 1:])
    reached = all_scan | all_skip

    for r in range(nrows):
        s, ln = starts[r], int(row_lengths[r])
        seen = np.empty((t, ln), dtype=bool)
        seen[:, 0] = True
        if ln > 1:
            np.logical_and.accumulate(continued[:, s : s + ln - 1], axis=1, out=seen[:, 1:])
        seen &= reached[:, r : r + 1]
        visits[s : s + ln] += seen.sum(axis=0)


# ---------------------------------------------------------------------------
# numba implementations (compiled lazily on first call)
# ---------------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def _base_weights_numba(cont):
        n = cont.shape[0]
        out = np.empty(n)
        w = 1.0
        for i in range(n):
            v = w
            if v > 1.0:
                v = 1.0
            if v < 0.0:
                v = 0.0
            out[i] = v
            w *= cont[i]
        return out

    @njit(cache=True)
    def _row_skip_weights_numba(cont, row_lengths, gamma, prefix):
        n = cont.shape[0]
        out = np.empty(n)
        scan = 1.0
        skip = 1.0
        pos = 0
        for r in range(row_lengths.shape[0]):
            ln = row_lengths[r]
            reach = 1.0 if r == 0 else scan + skip
            row_prod = 1.0
            if prefix:
                w = 1.0
                for j in range(ln):
                    v = reach * w
                    if v > 1.0:
                        v = 1.0
                    if v < 0.0:
                        v = 0.0
                    out[pos + j] = v
                    w *= cont[pos + j]
                row_prod = w
            else:
                for j in range(ln):
                    row_prod *= cont[pos + j]
                v = reach * row_prod
                if v > 1.0:
                    v = 1.0
                if v < 0.0:
                    v = 0.0
                for j in range(ln):
                    out[pos + j] = v
            scan *= (1.0 - gamma) * row_prod
            skip *= gamma
            pos += ln
        return out

    _slow_decay_weights_numba = njit(cache=True)(_slow_decay_weights_py)

    @njit(cache=True)
    def _mc_row_skip_counts_numba(cont, row_lengths, gamma, skip_u, cont_u, visits):
        t = skip_u.shape[0]
        nrows = row_lengths.shape[0]
        for k in range(t):
            all_scan = True
            all_skip = True
            pos = 0
            for r in range(nrows):
                ln = row_lengths[r]
                if all_scan or all_skip:
                    seen = True
                    for j in range(ln):
                        if seen:
                            visits[pos + j] += 1
                        seen = seen and (cont_u[k, pos + j] < cont[pos + j])
                row_skipped = skip_u[k, r] < gamma
                row_full = not row_skipped
                if row_full:
                    for j in range(ln):
                        if not (cont_u[k, pos + j] < cont[pos + j]):
                            row_full = False
                            break
                all_scan = all_scan and row_full
                all_skip = all_skip and row_skipped
                pos += ln


BACKENDS = {
    "numpy": {
        "base_weights": _base_weights_numpy,
        "row_skip_weights": _row_skip_weights_numpy,
        "slow_decay_weights": _slow_decay_weights_py,
        "mc_row_skip_counts": _mc_row_skip_counts_numpy,
    }
}
if HAS_NUMBA:
    BACKENDS["numba"] = {
        "base_weights": _base_weights_numba,
        "row_skip_weights": _row_skip_weights_numba,
        "slow_decay_weights": _slow_decay_weights_numba,
        "mc_row_skip_counts": _mc_row_skip_counts_numba,
    }


def _pick_backend() -> str:
    choice = os.environ.get("GRIDFAIR_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        return "numba" if HAS_NUMBA else "numpy"
    if choice not in ("numpy", "numba"):
        raise ValueError(
            f"GRIDFAIR_BACKEND={choice!r} not recognized (use numpy, numba, or auto)"
        )
    if choice == "numba" and not HAS_NUMBA:
        raise ImportError("GRIDFAIR_BACKEND=numba but numba is not importable")
    return choice


BACKEND = _pick_backend()

base_weights = BACKENDS[BACKEND]["base_weights"]
row_skip_weights = BACKENDS[BACKEND]["row_skip_weights"]
slow_decay_weights = BACKENDS[BACKEND]["slow_decay_weights"]
mc_row_skip_counts = BACKENDS[BACKEND]["mc_row_skip_counts"]


def warmup():
    """Trigger JIT compilation of the numba kernels on a tiny input."""
    cont = np.full(2, 0.5)
    lens = np.array([1, 1], dtype=np.int64)
    base_weights(cont)
    row_skip_weights(cont, lens, 0.5, True)
    row_skip_weights(cont, lens, 0.5, False)
    slow_decay_weights(cont, lens, 1.9)
    visits = np.zeros(2, dtype=np.int64)
    mc_row_skip_counts(
        cont, lens, 0.5, np.zeros((1, 2)), np.zeros((1, 2)), visits
    )
