"""Shared builders for graphs, runs and providers used across the suite."""

from __future__ import annotations

import numpy as np
import pytest

from taskweb.metrics import MetricConfig, combine
from taskweb.types import SeedRun, SetupId, TaskId, TaskWebGraph, TransferCell

BOTH = frozenset({"source", "target"})


def make_task(tid: str, category: str = "qa", roles=BOTH) -> TaskId:
    return TaskId(tid, category, frozenset(roles))


def make_setup(sid: str = "setupX") -> SetupId:
    return SetupId(sid, "t5", "base", "finetune")


def make_run(source, target, setup, seed, baseline, transfer) -> SeedRun:
    return SeedRun(
        source=source, target=target, setup=setup, seed=seed,
        baseline_metric=baseline, transfer_metric=transfer,
    )


def graph_from_scores(
    scores: dict,
    categories: dict | None = None,
    roles: dict | None = None,
    alpha: float = 1.0,
    pm_values: dict | None = None,
    provenance: dict | None = None,
) -> TaskWebGraph:
    """Build a graph with prescribed edge scores.

    ``scores`` maps (source, target) to either a float (single setup "s0")
    or a {setup: score} dict. With alpha=1 the combined score equals pc, so
    arbitrary score values stay bit-exactly recomputable.
    """
    categories = categories or {}
    roles = roles or {}
    pm_values = pm_values or {}
    cfg = MetricConfig(alpha=alpha, pm_scaling="raw")

    tasks = {}
    setups = {}
    cells = {}
    for (s, t), value in scores.items():
        per_setup = value if isinstance(value, dict) else {"s0": value}
        for task_id in (s, t):
            if task_id not in tasks:
                tasks[task_id] = make_task(
                    task_id,
                    categories.get(task_id, "qa"),
                    frozenset(roles.get(task_id, BOTH)),
                )
        for setup_id, score in per_setup.items():
            if setup_id not in setups:
                setups[setup_id] = SetupId(setup_id, "t5", "base", "finetune")
            pm_val = pm_values.get((s, t, setup_id), 0.5)
            cells[(s, t, setup_id)] = TransferCell(
                source=s, target=t, setup=setup_id,
                pc=score, pm=pm_val,
                score=combine(score, pm_val, cfg),
                n_seeds=1,
            )
    return TaskWebGraph(
        tasks=tasks, setups=setups, cells=cells,
        alpha=alpha, pm_scaling="raw", provenance=dict(provenance or {}),
    )


def random_graph(rng: np.random.Generator, n_tasks: int = 6,
                 n_setups: int = 1, density: float = 1.0) -> TaskWebGraph:
    """Random complete-ish graph over tasks t0..t{n-1}."""
    names = [f"t{i}" for i in range(n_tasks)]
    scores = {}
    for s in names:
        for t in names:
            if s == t:
                continue
            per_setup = {}
            for k in range(n_setups):
                if rng.random() <= density:
                    per_setup[f"s{k}"] = float(rng.normal(scale=0.1))
            if per_setup:
                scores[(s, t)] = per_setup
    return graph_from_scores(scores)


class DictProvider:
    """Similarity provider backed by a plain {(source, target_task): score} map."""

    name = "dict"

    def __init__(self, table: dict):
        self.table = dict(table)

    def knows(self, source: str) -> bool:
        return any(s == source for (s, _t) in self.table)

    def score(self, source: str, target) -> float:
        from taskweb.errors import UnknownSource

        try:
            return self.table[(source, target.task)]
        except KeyError:
            raise UnknownSource(f"{source}->{target.task}") from None


@pytest.fixture(scope="session")
def published():
    from taskweb.fixtures import published_web

    return published_web()


# One line per acceptance criterion, printed after the run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
