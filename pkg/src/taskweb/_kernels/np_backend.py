"""Pure-numpy kernels. Reference implementations for the numba backend."""

from __future__ import annotations

import numpy as np


def transitive_counts(scores, present, thresholds):
    """Count pivot triples above each threshold and how many close positively.

    Parameters
    ----------
    scores : (n, n) float64
        Edge scores; entries where ``present`` is False are ignored.
    present : (n, n) bool
        Which directed edges exist. The diagonal must be False.
    thresholds : (m,) float64
        Ascending hop-score thresholds.

    Returns
    -------
    eligible : (m,) int64
        Ordered distinct triples (a, b, c) with score(a,b) >= t,
        score(b,c) >= t and edge (a,c) present.
    positive : (m,) int64
        Those triples whose closing edge score(a,c) is > 0.
    """
    scores = np.asarray(scores, dtype=np.float64)
    present = np.asarray(present, dtype=bool)
    thresholds = np.asarray(thresholds, dtype=np.float64)

    closing = present.astype(np.int64)
    closing_pos = (present & (scores > 0.0)).astype(np.int64)

    m = thresholds.shape[0]
    eligible = np.zeros(m, dtype=np.int64)
    positive = np.zeros(m, dtype=np.int64)
    for i in range(m):
        hop = (present & (scores >= thresholds[i])).astype(np.int64)
        # paths[a, c] = number of pivots b with both hops above threshold;
        # false diagonals make a, b, c pairwise distinct automatically.
        paths = hop @ hop
        eligible[i] = int(np.sum(paths * closing))
        positive[i] = int(np.sum(paths * closing_pos))
    return eligible, positive


def pivot_scores(tw, tw_mask, f_vals, lam):
    """Batch pivot-path scores for every candidate source.

    For source i the score is
        lam * mean_j(0.5 * (tw[i, j] + f_vals[j])) + (1 - lam) * f_vals[i]
    over pivots j != i with tw_mask[i, j] set. Sources with no usable
    pivot get NaN.
    """
    tw = np.asarray(tw, dtype=np.float64)
    mask = np.asarray(tw_mask, dtype=bool).copy()
    f_vals = np.asarray(f_vals, dtype=np.float64)
    np.fill_diagonal(mask, False)

    contrib = np.where(mask, 0.5 * (tw + f_vals[None, :]), 0.0)
    counts = mask.sum(axis=1)
    out = np.full(tw.shape[0], np.nan)
    ok = counts > 0
    out[ok] = lam * (contrib.sum(axis=1)[ok] / counts[ok]) + (1.0 - lam) * f_vals[ok]
    return out
