"""Graph construction and whole-graph summaries."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import metrics
from .errors import (
    DuplicateSeed,
    EmptyGraph,
    EmptyLog,
    InsufficientOverlap,
    RoleViolation,
    SelfTransfer,
    TaskWebError,
)
from .types import SeedRun, TaskWebGraph, TransferCell


def ingest_runs(
    log: Sequence[SeedRun],
    alpha: float,
    pm_scaling: str = "signed",
    provenance: dict | None = None,
) -> TaskWebGraph:
    """Aggregate per-seed runs into one TransferCell per (source, target, setup).

    Deterministic: any ordering of the same log yields an identical graph.
    """
    if not log:
        raise EmptyLog("experiment log is empty")

    cfg = metrics.MetricConfig(alpha=alpha, pm_scaling=pm_scaling)
    tasks: dict = {}
    setups: dict = {}
    groups: dict = {}
    seen_seeds = set()

    for run in log:
        if run.source.id == run.target.id:
            raise SelfTransfer(f"run transfers {run.source.id!r} onto itself")
        if not run.target.is_target:
            raise RoleViolation(
                f"task {run.target.id!r} is source-only but appears as a target"
            )
        for task in (run.source, run.target):
            known = tasks.get(task.id)
            if known is None:
                tasks[task.id] = task
            elif known != task:
                raise TaskWebError(
                    f"task {task.id!r} appears with conflicting metadata"
                )
        known_setup = setups.get(run.setup.id)
        if known_setup is None:
            setups[run.setup.id] = run.setup
        elif known_setup != run.setup:
            raise TaskWebError(
                f"setup {run.setup.id!r} appears with conflicting metadata"
            )
        seed_key = run.key + (run.seed,)
        if seed_key in seen_seeds:
            raise DuplicateSeed(
                f"duplicate seed {run.seed} for {run.source.id}->{run.target.id} "
                f"setup {run.setup.id}"
            )
        seen_seeds.add(seed_key)
        groups.setdefault(run.key, []).append(run)

    cells = {}
    for key in sorted(groups):
        runs = sorted(groups[key], key=lambda r: r.seed)
        pc_val = metrics.pc(runs)
        pm_val = metrics.pm(runs)
        cells[key] = TransferCell(
            source=key[0],
            target=key[1],
            setup=key[2],
            pc=pc_val,
            pm=pm_val,
            score=metrics.combine(pc_val, pm_val, cfg),
            n_seeds=len(runs),
        )

    return TaskWebGraph(
        tasks=tasks,
        setups=setups,
        cells=cells,
        alpha=alpha,
        pm_scaling=pm_scaling,
        provenance=dict(provenance or {}),
    )


def avg_score(graph: TaskWebGraph, source: str, target: str):
    """Setup-averaged score for one edge, or None when no setup tested it."""
    return graph.avg_score(source, target)


def positivity_report(graph: TaskWebGraph, zero_tol: float | None = None) -> dict:
    """Sign tally of all edges in the averaged view.

    Scores with magnitude <= ``zero_tol`` count as zero. When ``zero_tol``
    is None it defaults to half the graph's recorded ``score_resolution``
    (provenance key), i.e. scores that would print as 0 at the resolution
    the graph was published at; graphs without a recorded resolution use
    exact zero.
    """
    if not graph.cells:
        raise EmptyGraph("graph has no cells")
    if zero_tol is None:
        zero_tol = float(graph.provenance.get("score_resolution", 0.0)) / 2.0

    positive = negative = zero = 0
    for score in graph.averaged_view().values():
        if abs(score) <= zero_tol:
            zero += 1
        elif score > 0:
            positive += 1
        else:
            negative += 1
    return {
        "positive": positive,
        "negative": negative,
        "zero": zero,
        "total": positive + negative + zero,
    }


def setup_similarity(graph: TaskWebGraph, min_overlap: int = 3):
    """Pearson correlation between the score matrices of every setup pair.

    Matrices are flattened over the intersection of edges present in both
    setups, so setups tested on different pair subsets stay comparable.

    Returns (setup_ids, matrix) with a symmetric unit-diagonal matrix.
    """
    setup_ids = graph.setup_ids()
    if len(setup_ids) < 2:
        raise InsufficientOverlap("need at least 2 setups to compare")

    views = {s: graph.setup_view(s) for s in setup_ids}
    n = len(setup_ids)
    matrix = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = setup_ids[i], setup_ids[j]
            common = sorted(views[a].keys() & views[b].keys())
            if len(common) < min_overlap:
                raise InsufficientOverlap(
                    f"setups {a!r} and {b!r} share only {len(common)} edges "
                    f"(need {min_overlap})",
                    setup_a=a, setup_b=b, shared=len(common),
                )
            va = np.array([views[a][k] for k in common])
            vb = np.array([views[b][k] for k in common])
            if va.std() == 0.0 or vb.std() == 0.0:
                raise InsufficientOverlap(
                    f"setups {a!r} and {b!r} have zero score variance on "
                    "their shared edges; correlation is undefined",
                    setup_a=a, setup_b=b,
                )
            r = float(np.corrcoef(va, vb)[0, 1])
            matrix[i, j] = matrix[j, i] = min(1.0, max(-1.0, r))
    return setup_ids, matrix


def score_matrix(graph: TaskWebGraph, view: str = "averaged", task_ids: list | None = None):
    """Dense (scores, present) matrices for kernel consumption.

    Rows and columns follow ``task_ids`` (default: all tasks, sorted).
    Missing edges carry score 0 with present=False; the diagonal is never
    present.
    """
    if task_ids is None:
        task_ids = graph.task_ids()
    index = {t: i for i, t in enumerate(task_ids)}
    n = len(task_ids)
    scores = np.zeros((n, n))
    present = np.zeros((n, n), dtype=bool)
    for (s, t), value in graph.view(view).items():
        si = index.get(s)
        ti = index.get(t)
        if si is None or ti is None:
            continue
        scores[si, ti] = value
        present[si, ti] = True
    return task_ids, scores, present
