"""Numba-compiled kernels. Same contracts as np_backend."""

from __future__ import annotations

import warnings

import numpy as np
from numba import njit, prange
from numba.core.errors import NumbaWarning

# The TBB-version notice is informational; numba falls back to another
# threading layer. Keep stderr clean for the CLI's JSON diagnostics.
warnings.filterwarnings(
    "ignore", message="The TBB threading layer requires", category=NumbaWarning,
)


@njit(cache=True, parallel=True)
def _transitive_counts(scores, present, thresholds):
    n = scores.shape[0]
    m = thresholds.shape[0]
    eligible = np.zeros(m, dtype=np.int64)
    positive = np.zeros(m, dtype=np.int64)

    closing_pos = np.empty((n, n), dtype=np.bool_)
    for i in range(n):
        for j in range(n):
            closing_pos[i, j] = present[i, j] and scores[i, j] > 0.0

    for k in range(m):
        t = thresholds[k]
        hop = np.empty((n, n), dtype=np.bool_)
        for i in range(n):
            for j in range(n):
                hop[i, j] = present[i, j] and scores[i, j] >= t
        n_eligible = 0
        n_positive = 0
        # hop and present have false diagonals, which keeps a, b, c distinct.
        for a in prange(n):
            path_counts = np.zeros(n, dtype=np.int64)
            for b in range(n):
                if hop[a, b]:
                    for c in range(n):
                        if hop[b, c]:
                            path_counts[c] += 1
            for c in range(n):
                if path_counts[c] > 0 and present[a, c]:
                    n_eligible += path_counts[c]
                    if closing_pos[a, c]:
                        n_positive += path_counts[c]
        eligible[k] = n_eligible
        positive[k] = n_positive
    return eligible, positive


@njit(cache=True)
def _pivot_scores(tw, tw_mask, f_vals, lam):
    n = tw.shape[0]
    out = np.full(n, np.nan)
    for i in range(n):
        acc = 0.0
        count = 0
        for j in range(n):
            if j == i or not tw_mask[i, j]:
                continue
            acc += 0.5 * (tw[i, j] + f_vals[j])
            count += 1
        if count > 0:
            out[i] = lam * (acc / count) + (1.0 - lam) * f_vals[i]
    return out


def transitive_counts(scores, present, thresholds):
    return _transitive_counts(
        np.ascontiguousarray(scores, dtype=np.float64),
        np.ascontiguousarray(present, dtype=np.bool_),
        np.ascontiguousarray(thresholds, dtype=np.float64),
    )


def pivot_scores(tw, tw_mask, f_vals, lam):
    return _pivot_scores(
        np.ascontiguousarray(tw, dtype=np.float64),
        np.ascontiguousarray(tw_mask, dtype=np.bool_),
        np.ascontiguousarray(f_vals, dtype=np.float64),
        float(lam),
    )
