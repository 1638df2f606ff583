"""Pivot-path scoring of candidate source tasks for an unseen target.

The direct estimate F(s->t) from a similarity provider is blended with
transfer evidence routed through pivot tasks: for every pivot p with a known
graph score T(s->p), the path s->p->t contributes (T(s->p) + F(p->t)) / 2,
and the pivot contributions are averaged. ``lam`` weighs the pivot-path mean
against the direct estimate.

Because T is directional, swapping source and target changes the score;
the method deliberately does not collapse to a symmetric similarity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import KTooLarge, LeakDetected, NoPivots, NoSources, UnknownSource
from .similarity import TargetExamples


@dataclass(frozen=True)
class TaskShopConfig:
    """``lam`` weighs the pivot-path mean; pivots default to all other sources."""

    lam: float = 0.5
    pivots: tuple | None = None

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must be in [0, 1], got {self.lam}")
        if self.pivots is not None:
            object.__setattr__(self, "pivots", tuple(self.pivots))


DEFAULT_CONFIG = TaskShopConfig()


@dataclass(frozen=True)
class SelectionResult:
    """Sources ranked for one target, best first. Ties break by task id."""

    target: str
    ranked: tuple  # ((source_id, score), ...) sorted by score desc
    method: str

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "method": self.method,
            "ranked": [{"source": s, "score": v} for s, v in self.ranked],
        }


def _check_target_unseen(web, target_task: str, allow_seen: bool):
    if allow_seen:
        return
    for (s, t, _setup) in web.cells:
        if s == target_task or t == target_task:
            raise LeakDetected(
                f"target {target_task!r} has transfer scores in the graph; "
                "mask them (leave-one-out) or pass allow_seen"
            )


def _candidate_sources(web, target_task: str) -> list:
    return [s for s in web.source_ids() if s != target_task]


def taskshop_score(
    source: str,
    target: TargetExamples,
    web,
    provider,
    cfg: TaskShopConfig = DEFAULT_CONFIG,
    allow_seen: bool = False,
) -> float:
    """Score one source task for the target. Higher is better."""
    if source not in web.tasks or not web.tasks[source].is_source:
        raise UnknownSource(f"task {source!r} is not a source in the graph")
    _check_target_unseen(web, target.task, allow_seen)

    if cfg.pivots is not None:
        pivots = [p for p in cfg.pivots if p not in (source, target.task)]
    else:
        pivots = [p for p in _candidate_sources(web, target.task) if p != source]
    if not pivots:
        raise NoPivots(f"no pivot tasks available for source {source!r}")

    acc = 0.0
    used = 0
    for p in pivots:
        t_sp = web.avg_score(source, p)
        if t_sp is None:
            continue
        acc += 0.5 * (t_sp + provider.score(p, target))
        used += 1
    if used == 0:
        raise NoPivots(
            f"source {source!r} has no graph score to any pivot task"
        )
    direct = provider.score(source, target)
    return cfg.lam * (acc / used) + (1.0 - cfg.lam) * direct


def rank_sources(
    target: TargetExamples,
    web,
    provider,
    cfg: TaskShopConfig = DEFAULT_CONFIG,
    allow_seen: bool = False,
    skip_unscorable: bool = False,
) -> SelectionResult:
    """Rank every source task in the graph for the target.

    Provider scores are computed once per task and shared between their
    pivot and direct roles, so a full ranking costs one provider call per
    candidate rather than one per (source, pivot) pair. Sources with no
    usable pivot raise NoPivots unless ``skip_unscorable`` drops them from
    the ranking instead.
    """
    _check_target_unseen(web, target.task, allow_seen)
    candidates = _candidate_sources(web, target.task)
    if not candidates:
        raise NoSources(f"graph has no candidate sources for {target.task!r}")

    f_cache = {c: provider.score(c, target) for c in candidates}

    if cfg.pivots is None:
        # default policy: pivots are the other candidates, so the batch
        # kernel can share one square matrix
        n = len(candidates)
        f_vals = np.array([f_cache[c] for c in candidates])
        tw = np.zeros((n, n))
        mask = np.zeros((n, n), dtype=bool)
        for i, s in enumerate(candidates):
            for j, p in enumerate(candidates):
                if i == j:
                    continue
                value = web.avg_score(s, p)
                if value is not None:
                    tw[i, j] = value
                    mask[i, j] = True
        scores = _kernels.pivot_scores(tw, mask, f_vals, cfg.lam)
        scored = list(zip(candidates, scores.tolist()))
    else:
        # explicit pivot lists may name tasks outside the candidate set
        # (target-only tasks); score per source, reusing cached F values
        pivot_ids = [p for p in dict.fromkeys(cfg.pivots)
                     if p != target.task and p in web.tasks]
        for p in pivot_ids:
            if p not in f_cache:
                f_cache[p] = provider.score(p, target)
        scored = []
        for s in candidates:
            acc = 0.0
            used = 0
            for p in pivot_ids:
                if p == s:
                    continue
                t_sp = web.avg_score(s, p)
                if t_sp is None:
                    continue
                acc += 0.5 * (t_sp + f_cache[p])
                used += 1
            value = (cfg.lam * (acc / used) + (1.0 - cfg.lam) * f_cache[s]
                     if used else float("nan"))
            scored.append((s, value))

    missing = [c for c, v in scored if np.isnan(v)]
    if missing and not skip_unscorable:
        raise NoPivots(f"no usable pivots for sources {missing}")
    if len(missing) == len(candidates):
        raise NoPivots(f"no usable pivots for any source: {missing}")

    order = sorted(
        ((c, v) for c, v in scored if not np.isnan(v)),
        key=lambda sv: (-sv[1], sv[0]),
    )
    return SelectionResult(
        target=target.task,
        ranked=tuple(order),
        method=f"taskshop(provider={provider.name}, lambda={cfg.lam})",
    )


def select_top_k(result: SelectionResult, k: int) -> list:
    """The k best sources, best first."""
    if not 1 <= k <= len(result.ranked):
        raise KTooLarge(f"k={k} out of range for {len(result.ranked)} ranked sources")
    return [s for s, _v in result.ranked[:k]]


def select_bottom_k(result: SelectionResult, k: int) -> list:
    """The k worst sources, worst first."""
    if not 1 <= k <= len(result.ranked):
        raise KTooLarge(f"k={k} out of range for {len(result.ranked)} ranked sources")
    worst_first = sorted(result.ranked, key=lambda sv: (sv[1], sv[0]))
    return [s for s, _v in worst_first[:k]]
