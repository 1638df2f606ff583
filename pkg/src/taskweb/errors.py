"""Domain errors raised by the engine.

Every error carries a stable machine-readable ``code`` so the CLI can emit
JSON diagnostics that downstream harnesses can match on.
"""

from __future__ import annotations

from typing import Any


class TaskWebError(Exception):
    """Base class for all domain errors."""

    code = "taskweb_error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = details

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self), "details": self.details}


# --- ingestion / graph construction

class EmptyLog(TaskWebError):
    code = "empty_log"


class NonPositiveBaseline(TaskWebError):
    code = "non_positive_baseline"


class DuplicateSeed(TaskWebError):
    code = "duplicate_seed"


class SelfTransfer(TaskWebError):
    code = "self_transfer"


class RoleViolation(TaskWebError):
    """A task appears in a position its declared roles forbid."""

    code = "role_violation"


class EmptyGraph(TaskWebError):
    code = "empty_graph"


class InsufficientOverlap(TaskWebError):
    code = "insufficient_overlap"


class SchemaViolation(TaskWebError):
    """Document fails the graph schema. ``path`` is a JSON-pointer string."""

    code = "schema_violation"

    def __init__(self, path: str, message: str = "", **details: Any):
        super().__init__(message or f"schema violation at {path}", path=path, **details)
        self.path = path


class UnknownTask(TaskWebError):
    code = "unknown_task"


# --- metrics

class MixedKeys(TaskWebError):
    code = "mixed_keys"


class PmOutOfRange(TaskWebError):
    code = "pm_out_of_range"


# --- structure analysis

class EmptyThresholds(TaskWebError):
    code = "empty_thresholds"


# --- similarity providers

class UnknownSource(TaskWebError):
    code = "unknown_source"


class ProviderUnavailable(TaskWebError):
    code = "provider_unavailable"


class DimensionMismatch(TaskWebError):
    code = "dimension_mismatch"


class EmptyInput(TaskWebError):
    code = "empty_input"


class BothZero(TaskWebError):
    code = "both_zero"


# --- selection / ranking

class NoPivots(TaskWebError):
    code = "no_pivots"


class NoSources(TaskWebError):
    code = "no_sources"


class KTooLarge(TaskWebError):
    code = "k_too_large"


# --- evaluation

class NotAPermutation(TaskWebError):
    code = "not_a_permutation"


class MissingTruth(TaskWebError):
    code = "missing_truth"


class LeakDetected(TaskWebError):
    """A selection method touched data masked for the current target."""

    code = "leak_detected"


# --- training-set assembly

class PoolTooSmall(TaskWebError):
    code = "pool_too_small"

    def __init__(self, task: str, have: int, need: int):
        super().__init__(
            f"pool for {task!r} has {have} examples, need {need}",
            task=task, have=have, need=need,
        )


class DuplicateTask(TaskWebError):
    code = "duplicate_task"


class Overlap(TaskWebError):
    code = "overlap"


class BadReplaceCount(TaskWebError):
    code = "bad_replace_count"
