"""Ranking-quality evaluation under a leave-one-out masking protocol.

For each target, the selection method only ever sees a masked graph with
every edge incident to that target removed; touching a masked edge raises
immediately and is counted, so leaks are detectable rather than silent.
The predicted order is then scored against the held-out truth with NDCG
and Regret@k, and results are aggregated per task category.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import KTooLarge, LeakDetected, MissingTruth, NotAPermutation, SelfTransfer
from .similarity import TargetExamples

# Relevances use linear gain (score - min), not exponential 2^rel - 1.
GAIN = "linear"


class MaskedGraph:
    """Read-only view of a graph with one task's edges hidden.

    Enumeration (``cells``, views, ``avg_score`` of other pairs) behaves as
    if the masked edges never existed. Directly querying a masked edge is a
    leak: it raises LeakDetected and increments ``leak_attempts``.
    """

    def __init__(self, web, masked_task: str):
        self.web = web
        self.masked_task = masked_task
        self.leak_attempts = 0
        self.tasks = web.tasks
        self.setups = web.setups
        self.alpha = web.alpha
        self.pm_scaling = web.pm_scaling
        self.cells = {
            key: cell
            for key, cell in web.cells.items()
            if masked_task not in (key[0], key[1])
        }
        self._pair_setups: dict = {}
        for (s, t, setup) in self.cells:
            self._pair_setups.setdefault((s, t), []).append(setup)
        for setups in self._pair_setups.values():
            setups.sort()

    def _guard(self, source: str, target: str):
        if self.masked_task in (source, target):
            self.leak_attempts += 1
            raise LeakDetected(
                f"edge {source!r}->{target!r} is masked for target "
                f"{self.masked_task!r}"
            )

    def task_ids(self) -> list:
        return sorted(self.tasks)

    def source_ids(self) -> list:
        return sorted(t for t, task in self.tasks.items() if task.is_source)

    def target_ids(self) -> list:
        return sorted(t for t, task in self.tasks.items() if task.is_target)

    def cell(self, source: str, target: str, setup: str):
        self._guard(source, target)
        return self.cells.get((source, target, setup))

    def avg_score(self, source: str, target: str):
        if source == target:
            raise SelfTransfer(f"self transfer {source!r} -> {target!r}")
        self._guard(source, target)
        setups = self._pair_setups.get((source, target))
        if not setups:
            return None
        total = sum(self.cells[(source, target, s)].score for s in setups)
        return total / len(setups)

    def view(self, view: str = "averaged") -> dict:
        pairs = self.web.view(view)
        return {
            (s, t): v for (s, t), v in pairs.items()
            if self.masked_task not in (s, t)
        }


def _relevances(truth: dict) -> dict:
    low = min(truth.values())
    return {task: score - low for task, score in truth.items()}


def _check_permutation(predicted_order: Sequence, truth: dict):
    if len(predicted_order) != len(set(predicted_order)) or \
            set(predicted_order) != set(truth):
        raise NotAPermutation(
            "predicted order must be a permutation of the truth tasks"
        )


def ndcg(predicted_order: Sequence, truth: dict) -> float:
    """Normalized discounted cumulative gain of a predicted source order.

    Relevances are truth scores shifted to be nonnegative (rel = score -
    min), which leaves the metric invariant under constant shifts of the
    truth. When every score ties, any order is ideal and the value is 1.
    """
    _check_permutation(predicted_order, truth)
    rel = _relevances(truth)
    dcg = sum(
        rel[task] / math.log2(i + 1)
        for i, task in enumerate(predicted_order, start=1)
    )
    ideal = sum(
        r / math.log2(i + 1)
        for i, r in enumerate(sorted(rel.values(), reverse=True), start=1)
    )
    if ideal == 0.0:
        return 1.0
    return dcg / ideal


def regret_at_k(predicted_order: Sequence, truth: dict, k: int) -> float:
    """Percent drop of the best truth value found in the predicted top-k."""
    _check_permutation(predicted_order, truth)
    if not 1 <= k <= len(truth):
        raise KTooLarge(f"k={k} out of range for {len(truth)} tasks")
    rel = _relevances(truth)
    best = max(rel.values())
    if best == 0.0:
        return 0.0
    best_in_k = max(rel[task] for task in predicted_order[:k])
    return 100.0 * (best - best_in_k) / best


@dataclass(frozen=True)
class RankingEvaluation:
    target: str
    category: str
    ndcg: float
    regret_at_k: dict  # k -> percent
    k_values: tuple

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "category": self.category,
            "ndcg": self.ndcg,
            "regret_at_k": {str(k): v for k, v in self.regret_at_k.items()},
        }


@dataclass(frozen=True)
class EvaluationReport:
    method: str
    k_values: tuple
    per_target: dict
    per_category: dict
    mean: dict
    leak_attempts: int = 0
    metadata: dict = field(default_factory=lambda: {"gain": GAIN})

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "metadata": {**self.metadata, "k_values": list(self.k_values)},
            "per_target": {t: e.to_json() for t, e in sorted(self.per_target.items())},
            "per_category": self.per_category,
            "mean": self.mean,
            "leak_attempts": self.leak_attempts,
        }


def truth_scores(web, target: str) -> dict:
    """Held-out ground truth: averaged incoming scores for the target."""
    truth = {
        s: web.avg_score(s, target)
        for s in web.source_ids()
        if s != target and web.avg_score(s, target) is not None
    }
    if not truth:
        raise MissingTruth(f"no incoming transfer scores for target {target!r}")
    return truth


def eligible_targets(web) -> list:
    """Targets with at least one incoming edge, i.e. evaluable ones."""
    incoming = {t for (_s, t, _setup) in web.cells}
    return sorted(t for t in web.target_ids() if t in incoming)


def loo_evaluate(
    web,
    method: Callable,
    k_values: Iterable[int] = (5,),
    targets: Sequence | None = None,
    examples: dict | None = None,
    method_name: str = "method",
    jobs: int = 1,
) -> EvaluationReport:
    """Evaluate a selection method over every target, leave-one-out.

    ``method(masked_web, target_examples)`` must return an ordering of the
    candidate sources, best first. ``examples`` maps task ids to
    TargetExamples; targets without an entry get a single placeholder
    example (enough for providers that only use the task id).
    """
    k_values = tuple(sorted(set(int(k) for k in k_values)))
    if targets is None:
        targets = eligible_targets(web)
    examples = examples or {}

    def evaluate_one(target: str):
        truth = truth_scores(web, target)
        masked = MaskedGraph(web, target)
        target_examples = examples.get(target) or TargetExamples(
            task=target, examples=(f"placeholder example for {target}",)
        )
        predicted = list(method(masked, target_examples))
        predicted = [s for s in predicted if s in truth]
        evaluation = RankingEvaluation(
            target=target,
            category=web.tasks[target].category,
            ndcg=ndcg(predicted, truth),
            regret_at_k={k: regret_at_k(predicted, truth, min(k, len(truth)))
                         for k in k_values},
            k_values=k_values,
        )
        return evaluation, masked.leak_attempts

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(evaluate_one, targets))
    else:
        outcomes = [evaluate_one(t) for t in targets]

    per_target = {t: ev for t, (ev, _leaks) in zip(targets, outcomes)}
    leak_attempts = sum(leaks for _ev, leaks in outcomes)

    by_category: dict = {}
    for ev in per_target.values():
        by_category.setdefault(ev.category, []).append(ev)
    per_category = {
        cat: {
            "ndcg": sum(e.ndcg for e in evs) / len(evs),
            "regret_at_k": {
                str(k): sum(e.regret_at_k[k] for e in evs) / len(evs)
                for k in k_values
            },
            "n_targets": len(evs),
        }
        for cat, evs in sorted(by_category.items())
    }
    all_evs = list(per_target.values())
    mean = {
        "ndcg": sum(e.ndcg for e in all_evs) / len(all_evs),
        "regret_at_k": {
            str(k): sum(e.regret_at_k[k] for e in all_evs) / len(all_evs)
            for k in k_values
        },
        "n_targets": len(all_evs),
    }
    return EvaluationReport(
        method=method_name,
        k_values=k_values,
        per_target=per_target,
        per_category=per_category,
        mean=mean,
        leak_attempts=leak_attempts,
    )
