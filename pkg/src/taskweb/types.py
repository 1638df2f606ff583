"""Core domain types: tasks, setups, per-seed runs, transfer cells, the graph."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SelfTransfer

CATEGORIES = ("nli", "paraphrase", "sentiment", "commonsense", "semantics", "qa")

# "mixed" marks pseudo-setups that aggregate several adaptation methods.
ADAPTATIONS = ("finetune", "adapter", "bitfit", "mixed")

ROLES = ("source", "target")


@dataclass(frozen=True)
class TaskId:
    """A task in the transfer graph.

    ``roles`` controls where the task may appear: a task without the
    "target" role is source-only and never receives incoming edges.
    """

    id: str
    category: str
    roles: frozenset = frozenset(ROLES)

    def __post_init__(self):
        if not self.id:
            raise ValueError("task id must be nonempty")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r} for task {self.id!r}")
        roles = frozenset(self.roles)
        if not roles or not roles.issubset(ROLES):
            raise ValueError(f"roles must be a nonempty subset of {ROLES}")
        object.__setattr__(self, "roles", roles)

    @property
    def is_source(self) -> bool:
        return "source" in self.roles

    @property
    def is_target(self) -> bool:
        return "target" in self.roles


@dataclass(frozen=True)
class SetupId:
    """One training configuration (model family, size, adaptation method)."""

    id: str
    model_family: str
    model_size: str
    adaptation: str

    def __post_init__(self):
        if not self.id:
            raise ValueError("setup id must be nonempty")
        if self.adaptation not in ADAPTATIONS:
            raise ValueError(f"unknown adaptation {self.adaptation!r}")


@dataclass(frozen=True)
class SeedRun:
    """One (source, target, setup, seed) experiment record.

    ``baseline_metric`` is the evaluation score of the model trained on the
    target alone; ``transfer_metric`` is the score after source-then-target
    training. Positivity of the baseline is checked at ingest time so the
    offending run can be identified in the error.
    """

    source: TaskId
    target: TaskId
    setup: SetupId
    seed: int
    baseline_metric: float
    transfer_metric: float

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")

    @property
    def key(self) -> tuple:
        return (self.source.id, self.target.id, self.setup.id)


@dataclass(frozen=True)
class TransferCell:
    """Aggregated transfer metrics for one directed edge under one setup."""

    source: str
    target: str
    setup: str
    pc: float
    pm: float
    score: float
    n_seeds: int

    def __post_init__(self):
        if not 0.0 <= self.pm <= 1.0:
            raise ValueError(f"pm must be in [0, 1], got {self.pm}")
        if self.n_seeds < 1:
            raise ValueError(f"n_seeds must be >= 1, got {self.n_seeds}")


@dataclass(frozen=True)
class TaskWebGraph:
    """Directed transfer graph. Immutable after construction.

    ``cells`` maps (source_id, target_id, setup_id) to a TransferCell.
    ``alpha`` and ``pm_scaling`` record the interpolation used to produce
    every cell's combined score, so scores stay recomputable bit-exactly.
    """

    tasks: dict
    setups: dict
    cells: dict
    alpha: float
    pm_scaling: str = "signed"
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.pm_scaling not in ("raw", "signed"):
            raise ValueError(f"unknown pm_scaling {self.pm_scaling!r}")

    # -- basic queries ----------------------------------------------------

    def task_ids(self) -> list:
        return sorted(self.tasks)

    def setup_ids(self) -> list:
        return sorted(self.setups)

    def source_ids(self) -> list:
        return sorted(t for t, task in self.tasks.items() if task.is_source)

    def target_ids(self) -> list:
        return sorted(t for t, task in self.tasks.items() if task.is_target)

    def cell(self, source: str, target: str, setup: str):
        return self.cells.get((source, target, setup))

    def avg_score(self, source: str, target: str):
        """Mean of per-setup scores for the edge, or None when untested.

        Missing per-setup cells are skipped, never imputed as zero.
        """
        if source == target:
            raise SelfTransfer(f"self transfer {source!r} -> {target!r}")
        scores = [
            self.cells[(source, target, setup)].score
            for setup in self.setup_ids()
            if (source, target, setup) in self.cells
        ]
        if not scores:
            return None
        return sum(scores) / len(scores)

    def averaged_view(self) -> dict:
        """All directed edges of the graph, averaged over available setups."""
        pairs = {(s, t) for (s, t, _setup) in self.cells}
        return {(s, t): self.avg_score(s, t) for (s, t) in sorted(pairs)}

    def setup_view(self, setup: str) -> dict:
        if setup not in self.setups:
            raise KeyError(f"unknown setup {setup!r}")
        return {
            (s, t): cell.score
            for (s, t, se), cell in sorted(self.cells.items())
            if se == setup
        }

    def view(self, view: str = "averaged") -> dict:
        """Scores as a {(source, target): score} map.

        ``view`` is "averaged" or a setup id.
        """
        if view == "averaged":
            return self.averaged_view()
        return self.setup_view(view)

    def n_edges(self) -> int:
        return len({(s, t) for (s, t, _setup) in self.cells})
