"""Balanced multi-task training manifests sampled from per-task example pools.

Sampling is deterministic: each task draws from its own Philox stream keyed
by (manifest seed, task id digest), so adding or removing one task never
changes what another task contributes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BadReplaceCount,
    DuplicateTask,
    LeakDetected,
    Overlap,
    PoolTooSmall,
    SchemaViolation,
    UnknownTask,
)

MANIFEST_VERSION = 1


@dataclass(frozen=True)
class ExamplePool:
    """All prompted examples available for one task. Example ids are unique."""

    task: str
    examples: tuple  # of {"id", "prompt", "answer"} dicts

    def __post_init__(self):
        ids = [ex["id"] for ex in self.examples]
        if len(ids) != len(set(ids)):
            raise SchemaViolation("/examples", f"duplicate example ids in pool {self.task!r}")

    def __len__(self) -> int:
        return len(self.examples)


def load_pool(path, task: str) -> ExamplePool:
    """Read a pool JSONL file of {"id", "prompt", "answer"} rows."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                rows.append({
                    "id": str(row["id"]),
                    "prompt": row["prompt"],
                    "answer": row["answer"],
                })
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise SchemaViolation(f"/{lineno}", f"bad pool row: {exc}") from exc
    return ExamplePool(task=task, examples=tuple(rows))


@dataclass(frozen=True)
class TrainingManifest:
    target: str
    recipe: dict   # method, k, per_task, seed, replaced
    rows: tuple    # of {"task", "example_id", "prompt", "answer"}

    def tasks(self) -> list:
        seen = []
        for row in self.rows:
            if row["task"] not in seen:
                seen.append(row["task"])
        return seen

    def to_jsonl(self) -> str:
        lines = [json.dumps(
            {"version": MANIFEST_VERSION, "target": self.target, "recipe": self.recipe},
            sort_keys=True,
        )]
        lines.extend(json.dumps(row, sort_keys=True) for row in self.rows)
        return "\n".join(lines) + "\n"


def load_manifest(path) -> TrainingManifest:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise SchemaViolation("", "empty manifest file")
    meta = json.loads(lines[0])
    rows = tuple(json.loads(line) for line in lines[1:])
    return TrainingManifest(target=meta["target"], recipe=meta["recipe"], rows=rows)


def _task_rng(seed: int, task: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}|{task}".encode("utf-8")).digest()
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))


def sample_pool(pool: ExamplePool, per_task: int, seed: int) -> list:
    """Draw per_task examples without replacement, deterministically."""
    if len(pool) < per_task:
        raise PoolTooSmall(pool.task, len(pool), per_task)
    rng = _task_rng(seed, pool.task)
    indices = rng.permutation(len(pool))[:per_task]
    return [pool.examples[i] for i in indices]


def build_manifest(
    target: str,
    selected: Sequence,
    pools: dict,
    per_task: int,
    seed: int,
    method: str = "custom",
    replaced: int = 0,
) -> TrainingManifest:
    """Sample per_task examples from every selected task, in task order."""
    selected = list(selected)
    if len(selected) != len(set(selected)):
        raise DuplicateTask(f"selected tasks contain duplicates: {selected}")
    if target in selected:
        raise LeakDetected(
            f"target task {target!r} cannot appear in its own training set"
        )
    rows = []
    for task in selected:
        if task not in pools:
            raise UnknownTask(f"no example pool for task {task!r}")
        for ex in sample_pool(pools[task], per_task, seed):
            rows.append({
                "task": task,
                "example_id": ex["id"],
                "prompt": ex["prompt"],
                "answer": ex["answer"],
            })
    return TrainingManifest(
        target=target,
        recipe={
            "method": method,
            "k": len(selected),
            "per_task": per_task,
            "seed": seed,
            "replaced": replaced,
            "tasks": selected,
        },
        rows=tuple(rows),
    )


def mix_manifest(
    target: str,
    top: Sequence,
    bottom: Sequence,
    replace_count: int,
    pools: dict,
    per_task: int,
    seed: int,
) -> TrainingManifest:
    """Swap the tail of the top task list for the head of the bottom list.

    The manifest size is invariant in replace_count: k tasks go in either
    way, only their identities change.
    """
    top = list(top)
    bottom = list(bottom)
    if len(top) != len(bottom):
        raise BadReplaceCount(
            f"top and bottom must have equal length, got {len(top)} and {len(bottom)}"
        )
    if set(top) & set(bottom):
        raise Overlap(f"top and bottom overlap: {sorted(set(top) & set(bottom))}")
    if not 0 <= replace_count <= len(top):
        raise BadReplaceCount(
            f"replace_count must be in [0, {len(top)}], got {replace_count}"
        )
    tasks = top[: len(top) - replace_count] + bottom[:replace_count]
    return build_manifest(
        target, tasks, pools, per_task, seed,
        method="mix", replaced=replace_count,
    )
