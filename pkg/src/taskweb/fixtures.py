"""Bundled fixture assets: the published-score graph and demo files.

The graph ships with setups collapsed to the single pseudo-setup "avg7"
(seven training configurations averaged). Its provenance records
``score_resolution`` = 0.01, the precision the source tallies were made at.
"""

from __future__ import annotations

import shutil
from importlib import resources
from pathlib import Path

from .types import TaskWebGraph
from .webio import load_web

WEB_FILE = "web_avg7.json"
EMBEDDINGS_FILE = "embeddings_demo.jsonl"
TARGET_EXAMPLES_FILE = "copa_examples.jsonl"
SAMPLE_RUNS_FILE = "sample_runs.csv"

_ASSETS = (WEB_FILE, EMBEDDINGS_FILE, TARGET_EXAMPLES_FILE, SAMPLE_RUNS_FILE)


def _data(name: str):
    return resources.files("taskweb").joinpath("fixtures_data").joinpath(name)


def published_web() -> TaskWebGraph:
    """The bundled averaged transfer-score graph (22 tasks, 441 edges)."""
    return load_web(_data(WEB_FILE).read_bytes())


def asset_path(name: str) -> Path:
    return Path(str(_data(name)))


def write_fixtures(out_dir) -> list:
    """Copy every bundled asset into ``out_dir``; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in _ASSETS:
        dest = out / name
        with resources.as_file(_data(name)) as src:
            shutil.copy(src, dest)
        written.append(dest)
    return written
