"""Commutativity and transitivity analyses of the transfer graph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .core import score_matrix
from .errors import EmptyGraph, EmptyThresholds
from .types import TaskWebGraph


@dataclass(frozen=True)
class CommutativityReport:
    """Sign agreement between the two directions of every tested pair.

    A pair where either direction scores exactly zero gets the verdict
    "zero" (a sign test cannot classify it).
    """

    pairs_total: int
    same_sign: int
    opposite_sign: int
    zero_count: int
    undirected_pairs: tuple

    def to_json(self) -> dict:
        return {
            "pairs_total": self.pairs_total,
            "same_sign": self.same_sign,
            "opposite_sign": self.opposite_sign,
            "zero_count": self.zero_count,
            "pairs": [
                {
                    "task_a": a, "task_b": b,
                    "score_ab": ab, "score_ba": ba,
                    "verdict": verdict,
                }
                for (a, b, ab, ba, verdict) in self.undirected_pairs
            ],
        }


@dataclass(frozen=True)
class TransitivityCurve:
    """Per-threshold counts of pivot triples and their positive-closure rate."""

    thresholds: tuple
    eligible_triples: tuple
    positive_fraction: tuple  # None where no triple is eligible

    def to_json(self) -> dict:
        return {
            "points": [
                {
                    "threshold": t,
                    "eligible_triples": e,
                    "positive_fraction": f,
                }
                for t, e, f in zip(
                    self.thresholds, self.eligible_triples, self.positive_fraction
                )
            ]
        }


def commutativity(graph: TaskWebGraph, view: str = "averaged") -> CommutativityReport:
    """Classify every unordered pair tested in both directions by sign."""
    if not graph.cells:
        raise EmptyGraph("graph has no cells")
    scores = graph.view(view)

    same = opposite = zero = 0
    rows = []
    for (a, b) in sorted(scores):
        if a >= b or (b, a) not in scores:
            continue
        ab = scores[(a, b)]
        ba = scores[(b, a)]
        if ab == 0.0 or ba == 0.0:
            verdict = "zero"
            zero += 1
        elif (ab > 0) == (ba > 0):
            verdict = "same_sign"
            same += 1
        else:
            verdict = "opposite_sign"
            opposite += 1
        rows.append((a, b, ab, ba, verdict))

    return CommutativityReport(
        pairs_total=len(rows),
        same_sign=same,
        opposite_sign=opposite,
        zero_count=zero,
        undirected_pairs=tuple(rows),
    )


def transitivity_curve(
    graph: TaskWebGraph,
    thresholds: Sequence[float],
    view: str = "averaged",
) -> TransitivityCurve:
    """Positive-closure rate of pivot paths as the hop threshold rises.

    For each threshold t, eligible triples are ordered distinct (a, b, c)
    with score(a->b) >= t, score(b->c) >= t and the edge a->c tested;
    triples whose closing edge is untested are excluded rather than imputed.
    """
    thresholds = [float(t) for t in thresholds]
    if not thresholds:
        raise EmptyThresholds("thresholds must be nonempty")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise EmptyThresholds("thresholds must be strictly ascending")
    if not graph.cells:
        raise EmptyGraph("graph has no cells")

    _, scores, present = score_matrix(graph, view=view)
    eligible, positive = _kernels.transitive_counts(
        scores, present, np.asarray(thresholds)
    )
    fractions = tuple(
        (p / e) if e > 0 else None
        for e, p in zip(eligible.tolist(), positive.tolist())
    )
    return TransitivityCurve(
        thresholds=tuple(thresholds),
        eligible_triples=tuple(eligible.tolist()),
        positive_fraction=fractions,
    )


def parse_threshold_range(expr: str) -> list:
    """Parse "start:stop:step" into an inclusive ascending threshold list."""
    parts = expr.split(":")
    if len(parts) != 3:
        raise EmptyThresholds(f"bad threshold range {expr!r}, expected start:stop:step")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise EmptyThresholds(f"bad threshold range {expr!r}")
    # Half-step slack keeps the endpoint inclusive despite float error.
    count = int(np.floor((stop - start) / step + 0.5)) + 1
    return [start + i * step for i in range(count)]
