"""Reading and writing graph documents and experiment logs.

The graph document is JSON with top-level keys ``version``, ``alpha``,
``tasks``, ``setups``, ``cells`` plus the optional ``pm_scaling`` and
``provenance``. Validation is strict: unknown keys are rejected and every
failure reports a JSON-pointer-style path.
"""

from __future__ import annotations

import csv
import io
import json

from . import metrics
from .errors import NonPositiveBaseline, SchemaViolation, UnknownTask
from .types import ADAPTATIONS, CATEGORIES, ROLES, SeedRun, SetupId, TaskId, TaskWebGraph, TransferCell

SCHEMA_VERSION = 1

_TOP_KEYS = {"version", "alpha", "pm_scaling", "provenance", "tasks", "setups", "cells"}
_TASK_KEYS = {"id", "category", "roles"}
_SETUP_KEYS = {"id", "model_family", "model_size", "adaptation"}
_CELL_KEYS = {"source", "target", "setup", "pc", "pm", "score", "n_seeds"}


def save_web(graph: TaskWebGraph) -> bytes:
    """Serialize a graph to canonical JSON bytes (stable field and row order)."""
    doc = {
        "version": SCHEMA_VERSION,
        "alpha": graph.alpha,
        "pm_scaling": graph.pm_scaling,
        "provenance": graph.provenance,
        "tasks": [
            {"id": t.id, "category": t.category, "roles": sorted(t.roles)}
            for t in (graph.tasks[k] for k in graph.task_ids())
        ],
        "setups": [
            {
                "id": s.id,
                "model_family": s.model_family,
                "model_size": s.model_size,
                "adaptation": s.adaptation,
            }
            for s in (graph.setups[k] for k in graph.setup_ids())
        ],
        "cells": [
            {
                "source": c.source,
                "target": c.target,
                "setup": c.setup,
                "pc": c.pc,
                "pm": c.pm,
                "score": c.score,
                "n_seeds": c.n_seeds,
            }
            for c in (graph.cells[k] for k in sorted(graph.cells))
        ],
    }
    return (json.dumps(doc, indent=1, sort_keys=True) + "\n").encode("utf-8")


def _require(cond: bool, path: str, message: str):
    if not cond:
        raise SchemaViolation(path, message)


def _check_keys(obj: dict, allowed: set, required: set, path: str):
    for key in obj:
        if key not in allowed:
            raise SchemaViolation(f"{path}/{key}", f"unknown key {key!r}")
    for key in required:
        if key not in obj:
            raise SchemaViolation(f"{path}/{key}", f"missing key {key!r}")


def _number(obj: dict, key: str, path: str) -> float:
    value = obj[key]
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             f"{path}/{key}", "expected a number")
    return float(value)


def load_web(data: bytes | str) -> TaskWebGraph:
    """Parse and validate a graph document. Inverse of save_web."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("", f"not valid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "", "document must be a JSON object")
    _check_keys(doc, _TOP_KEYS, {"version", "alpha", "tasks", "setups", "cells"}, "")

    _require(isinstance(doc["version"], int) and not isinstance(doc["version"], bool),
             "/version", "expected an integer")
    _require(doc["version"] == SCHEMA_VERSION, "/version",
             f"unsupported version {doc['version']} (expected {SCHEMA_VERSION})")
    alpha = _number(doc, "alpha", "")
    _require(0.0 <= alpha <= 1.0, "/alpha", "alpha must be in [0, 1]")

    pm_scaling = doc.get("pm_scaling", "signed")
    _require(pm_scaling in ("raw", "signed"), "/pm_scaling",
             "pm_scaling must be 'raw' or 'signed'")
    provenance = doc.get("provenance", {})
    _require(isinstance(provenance, dict), "/provenance", "expected an object")

    _require(isinstance(doc["tasks"], list), "/tasks", "expected an array")
    tasks = {}
    for i, entry in enumerate(doc["tasks"]):
        path = f"/tasks/{i}"
        _require(isinstance(entry, dict), path, "expected an object")
        _check_keys(entry, _TASK_KEYS, _TASK_KEYS, path)
        _require(isinstance(entry["id"], str) and entry["id"], f"{path}/id",
                 "expected a nonempty string")
        _require(entry["category"] in CATEGORIES, f"{path}/category",
                 f"category must be one of {CATEGORIES}")
        roles = entry["roles"]
        _require(isinstance(roles, list) and roles and set(roles).issubset(ROLES),
                 f"{path}/roles", f"roles must be a nonempty subset of {ROLES}")
        _require(entry["id"] not in tasks, f"{path}/id",
                 f"duplicate task id {entry['id']!r}")
        tasks[entry["id"]] = TaskId(entry["id"], entry["category"], frozenset(roles))

    _require(isinstance(doc["setups"], list), "/setups", "expected an array")
    setups = {}
    for i, entry in enumerate(doc["setups"]):
        path = f"/setups/{i}"
        _require(isinstance(entry, dict), path, "expected an object")
        _check_keys(entry, _SETUP_KEYS, _SETUP_KEYS, path)
        for key in ("id", "model_family", "model_size"):
            _require(isinstance(entry[key], str) and entry[key], f"{path}/{key}",
                     "expected a nonempty string")
        _require(entry["adaptation"] in ADAPTATIONS, f"{path}/adaptation",
                 f"adaptation must be one of {ADAPTATIONS}")
        _require(entry["id"] not in setups, f"{path}/id",
                 f"duplicate setup id {entry['id']!r}")
        setups[entry["id"]] = SetupId(
            entry["id"], entry["model_family"], entry["model_size"], entry["adaptation"]
        )

    cfg = metrics.MetricConfig(alpha=alpha, pm_scaling=pm_scaling)
    _require(isinstance(doc["cells"], list), "/cells", "expected an array")
    cells = {}
    for i, entry in enumerate(doc["cells"]):
        path = f"/cells/{i}"
        _require(isinstance(entry, dict), path, "expected an object")
        _check_keys(entry, _CELL_KEYS, _CELL_KEYS, path)
        for key in ("source", "target", "setup"):
            _require(isinstance(entry[key], str), f"{path}/{key}", "expected a string")
        _require(entry["source"] in tasks, f"{path}/source",
                 f"unknown task {entry['source']!r}")
        _require(entry["target"] in tasks, f"{path}/target",
                 f"unknown task {entry['target']!r}")
        _require(entry["setup"] in setups, f"{path}/setup",
                 f"unknown setup {entry['setup']!r}")
        _require(entry["source"] != entry["target"], f"{path}/target",
                 "source and target must differ")
        _require(tasks[entry["target"]].is_target, f"{path}/target",
                 f"task {entry['target']!r} is source-only")
        pc_val = _number(entry, "pc", path)
        pm_val = _number(entry, "pm", path)
        _require(0.0 <= pm_val <= 1.0, f"{path}/pm", "pm must be in [0, 1]")
        score = _number(entry, "score", path)
        _require(score == metrics.combine(pc_val, pm_val, cfg), f"{path}/score",
                 "score does not equal combine(pc, pm) under the recorded alpha")
        n_seeds = entry["n_seeds"]
        _require(isinstance(n_seeds, int) and not isinstance(n_seeds, bool)
                 and n_seeds >= 1, f"{path}/n_seeds", "expected an integer >= 1")
        key = (entry["source"], entry["target"], entry["setup"])
        _require(key not in cells, path, f"duplicate cell {key}")
        cells[key] = TransferCell(
            source=entry["source"], target=entry["target"], setup=entry["setup"],
            pc=pc_val, pm=pm_val, score=score, n_seeds=n_seeds,
        )

    return TaskWebGraph(
        tasks=tasks, setups=setups, cells=cells,
        alpha=alpha, pm_scaling=pm_scaling, provenance=provenance,
    )


def save_web_file(graph: TaskWebGraph, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save_web(graph))


def load_web_file(path) -> TaskWebGraph:
    with open(path, "rb") as fh:
        return load_web(fh.read())


RUNS_HEADER = ["source", "target", "setup", "seed", "baseline_metric", "transfer_metric"]


def read_runs_csv(text: str, task_resolver, setup_resolver) -> list:
    """Parse an experiment log CSV into SeedRun records.

    ``task_resolver(id)`` and ``setup_resolver(id)`` map bare identifiers to
    TaskId / SetupId records (see registry.resolvers).
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != RUNS_HEADER:
        raise SchemaViolation(
            "/header",
            f"expected columns {','.join(RUNS_HEADER)}, got "
            f"{','.join(reader.fieldnames or [])}",
        )
    runs = []
    for lineno, row in enumerate(reader, start=2):
        try:
            run = SeedRun(
                source=task_resolver(row["source"]),
                target=task_resolver(row["target"]),
                setup=setup_resolver(row["setup"]),
                seed=int(row["seed"]),
                baseline_metric=float(row["baseline_metric"]),
                transfer_metric=float(row["transfer_metric"]),
            )
        except UnknownTask:
            raise
        except (TypeError, ValueError) as exc:
            raise SchemaViolation(f"/rows/{lineno}", f"bad row: {exc}") from exc
        if run.baseline_metric <= 0:
            raise NonPositiveBaseline(
                f"row {lineno}: baseline must be > 0, got {run.baseline_metric}",
                row=lineno,
            )
        runs.append(run)
    return runs


def read_runs_csv_file(path, task_resolver, setup_resolver) -> list:
    with open(path, "r", encoding="utf-8") as fh:
        return read_runs_csv(fh.read(), task_resolver, setup_resolver)
