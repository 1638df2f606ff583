"""Built-in task and setup registry.

Covers the 22 benchmark tasks and the seven training setups the bundled
fixture was gathered under, so CSV logs that use these identifiers ingest
without a sidecar metadata file. squad2 is registered source-only.
"""

from __future__ import annotations

import json

from .errors import SchemaViolation, UnknownTask
from .types import SetupId, TaskId

_SOURCE_ONLY = frozenset({"source"})
_BOTH = frozenset({"source", "target"})

TASKS = {
    task.id: task
    for task in [
        TaskId("anli", "nli", _BOTH),
        TaskId("cb", "nli", _BOTH),
        TaskId("qnli", "nli", _BOTH),
        TaskId("rte", "nli", _BOTH),
        TaskId("scitail", "nli", _BOTH),
        TaskId("snli", "nli", _BOTH),
        TaskId("mrpc", "paraphrase", _BOTH),
        TaskId("qqp", "paraphrase", _BOTH),
        TaskId("stsb", "paraphrase", _BOTH),
        TaskId("imdb", "sentiment", _BOTH),
        TaskId("rotten_tomatoes", "sentiment", _BOTH),
        TaskId("copa", "commonsense", _BOTH),
        TaskId("cosmosqa", "commonsense", _BOTH),
        TaskId("hellaswag", "commonsense", _BOTH),
        TaskId("piqa", "commonsense", _BOTH),
        TaskId("quartz", "commonsense", _BOTH),
        TaskId("socialiqa", "commonsense", _BOTH),
        TaskId("winogrande", "commonsense", _BOTH),
        TaskId("wic", "semantics", _BOTH),
        TaskId("wsc", "semantics", _BOTH),
        TaskId("boolq", "qa", _BOTH),
        TaskId("squad2", "qa", _SOURCE_ONLY),
    ]
}

SETUPS = {
    setup.id: setup
    for setup in [
        SetupId("t5s_ft", "t5", "small", "finetune"),
        SetupId("t5b_ft", "t5", "base", "finetune"),
        SetupId("t5l_ft", "t5", "large", "finetune"),
        SetupId("t5b_ad", "t5", "base", "adapter"),
        SetupId("t5b_bf", "t5", "base", "bitfit"),
        SetupId("gpt2m_ft", "gpt2", "medium", "finetune"),
        SetupId("rob_ft", "roberta", "base", "finetune"),
    ]
}

# Pseudo-setup carried by the bundled fixture: seven setups averaged.
AVG_SETUP = SetupId("avg7", "mixed", "mixed", "mixed")


def load_task_sidecar(path) -> dict:
    """Read a tasks sidecar: JSON array of {id, category, roles}."""
    with open(path, "r", encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise SchemaViolation("", "tasks sidecar must be a JSON array")
    out = {}
    for i, entry in enumerate(entries):
        try:
            task = TaskId(entry["id"], entry["category"], frozenset(entry["roles"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolation(f"/{i}", f"bad task entry: {exc}") from exc
        out[task.id] = task
    return out


def load_setup_sidecar(path) -> dict:
    """Read a setups sidecar: JSON array of {id, model_family, model_size, adaptation}."""
    with open(path, "r", encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise SchemaViolation("", "setups sidecar must be a JSON array")
    out = {}
    for i, entry in enumerate(entries):
        try:
            setup = SetupId(
                entry["id"], entry["model_family"], entry["model_size"],
                entry["adaptation"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolation(f"/{i}", f"bad setup entry: {exc}") from exc
        out[setup.id] = setup
    return out


def task_resolver(extra: dict | None = None):
    """Resolver mapping task ids to records; registry first, then ``extra``."""
    table = dict(TASKS)
    table.update(extra or {})

    def resolve(task_id: str) -> TaskId:
        task = table.get(task_id)
        if task is None:
            raise UnknownTask(
                f"task {task_id!r} is not in the registry; pass a tasks sidecar "
                "with its category and roles"
            )
        return task

    return resolve


def setup_resolver(extra: dict | None = None):
    """Resolver for setup ids. Unregistered ids get generic metadata."""
    table = dict(SETUPS)
    table[AVG_SETUP.id] = AVG_SETUP
    table.update(extra or {})

    def resolve(setup_id: str) -> SetupId:
        setup = table.get(setup_id)
        if setup is None:
            return SetupId(setup_id, "unknown", "unknown", "finetune")
        return setup

    return resolve
