"""Few-example task similarity scorers.

All of them answer one question: given a candidate source task and a small
set of prompted examples from a target task, how transferable does the pair
look? Three styles are provided behind the same ``score(source, target)``
interface:

* ``FileProvider`` - exact lookup of precomputed pair scores, no guessing.
* ``EmbeddingProvider`` - cosine similarity of mean-pooled text embeddings.
* ``JudgeProvider`` - a remote LLM judged yes/no probability, normalized;
  ``StubJudgeProvider`` is its deterministic offline stand-in.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import threading
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BothZero,
    DimensionMismatch,
    EmptyInput,
    ProviderUnavailable,
    SchemaViolation,
    UnknownSource,
    UnknownTask,
)

MAX_TARGET_EXAMPLES = 32
DEFAULT_SOURCE_POOL = 100
DEFAULT_JUDGE_TIMEOUT = 10.0
DEFAULT_JUDGE_RETRIES = 2
DEFAULT_MAX_IN_FLIGHT = 4

ENDPOINT_ENV = "TASKWEB_JUDGE_ENDPOINT"
TOKEN_ENV = "TASKWEB_JUDGE_TOKEN"
CACHE_DIR_ENV = "TASKWEB_CACHE_DIR"


@dataclass(frozen=True)
class TargetExamples:
    """A target task identifier with its few available prompted examples."""

    task: str
    examples: tuple

    def __post_init__(self):
        if not self.task:
            raise ValueError("task id must be nonempty")
        examples = tuple(self.examples)
        if not 1 <= len(examples) <= MAX_TARGET_EXAMPLES:
            raise ValueError(
                f"need between 1 and {MAX_TARGET_EXAMPLES} examples, "
                f"got {len(examples)}"
            )
        object.__setattr__(self, "examples", examples)

    def digest(self) -> str:
        h = hashlib.sha256()
        for ex in self.examples:
            h.update(ex.encode("utf-8"))
            h.update(b"\x00")
        return h.hexdigest()


def load_target_examples(path) -> TargetExamples:
    """Read a target-examples JSONL file: {"task": ..., "prompt": ...} rows."""
    task = None
    examples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            row = json.loads(line)
            if task is None:
                task = row.get("task")
            elif row.get("task") != task:
                raise SchemaViolation(f"/{lineno}/task", "mixed task ids in one file")
            examples.append(row["prompt"])
    if task is None:
        raise SchemaViolation("", "no rows in target examples file")
    return TargetExamples(task=task, examples=tuple(examples))


# --- embeddings -----------------------------------------------------------

@dataclass(frozen=True)
class TaskEmbedding:
    task: str
    vector: tuple
    n_pooled: int


def roe_pool(example_vectors: Sequence) -> np.ndarray:
    """Componentwise mean of example embedding vectors."""
    if len(example_vectors) == 0:
        raise EmptyInput("cannot pool zero vectors")
    dims = {len(v) for v in example_vectors}
    if len(dims) != 1:
        raise DimensionMismatch(f"mixed vector dimensions {sorted(dims)}")
    return np.mean(np.asarray(example_vectors, dtype=np.float64), axis=0)


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector shapes differ: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise EmptyInput("cosine undefined for zero-norm vectors")
    return float(np.dot(a, b) / (na * nb))


class EmbeddingStore:
    """Task embedding table loaded from the JSONL embedding file format."""

    def __init__(self, embeddings: dict):
        dims = {len(e.vector) for e in embeddings.values()}
        if len(dims) > 1:
            raise DimensionMismatch(f"embedding store mixes dimensions {sorted(dims)}")
        self._table = dict(embeddings)
        self.dim = dims.pop() if dims else 0

    @classmethod
    def from_jsonl(cls, text: str) -> "EmbeddingStore":
        table = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(f"/{lineno}", f"bad JSON: {exc}") from exc
            try:
                task = row["task"]
                dim = row["dim"]
                n_pooled = row["n_pooled"]
                vector = row["vector"]
            except KeyError as exc:
                raise SchemaViolation(f"/{lineno}/{exc.args[0]}", "missing key") from exc
            if len(vector) != dim:
                raise DimensionMismatch(
                    f"line {lineno}: vector length {len(vector)} != dim {dim}"
                )
            if task in table:
                raise SchemaViolation(f"/{lineno}/task", f"duplicate task {task!r}")
            table[task] = TaskEmbedding(task=task, vector=tuple(vector), n_pooled=n_pooled)
        return cls(table)

    @classmethod
    def from_file(cls, path) -> "EmbeddingStore":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_jsonl(fh.read())

    def to_jsonl(self) -> str:
        lines = []
        for task in sorted(self._table):
            e = self._table[task]
            lines.append(json.dumps(
                {"task": e.task, "dim": len(e.vector), "n_pooled": e.n_pooled,
                 "vector": list(e.vector)},
                sort_keys=True,
            ))
        return "\n".join(lines) + "\n"

    def __contains__(self, task: str) -> bool:
        return task in self._table

    def vector(self, task: str) -> np.ndarray:
        if task not in self._table:
            raise UnknownTask(f"no embedding for task {task!r}")
        return np.asarray(self._table[task].vector, dtype=np.float64)

    def tasks(self) -> list:
        return sorted(self._table)


# --- judge scores ---------------------------------------------------------

@dataclass(frozen=True)
class JudgeScore:
    p_yes: float
    p_no: float

    def __post_init__(self):
        if self.p_yes < 0 or self.p_no < 0:
            raise ValueError("probabilities must be nonnegative")


def judge_normalize(j: JudgeScore) -> float:
    """Collapse yes/no mass into a single [0, 1] transferability score."""
    total = j.p_yes + j.p_no
    if total <= 0:
        raise BothZero("p_yes + p_no must be > 0")
    return j.p_yes / total


# --- providers ------------------------------------------------------------

class FileProvider:
    """Precomputed pair scores; unknown pairs are an error, never a guess."""

    name = "file"

    def __init__(self, scores: dict):
        self._scores = dict(scores)

    @classmethod
    def from_csv(cls, text: str) -> "FileProvider":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != ["source", "target", "score"]:
            raise SchemaViolation("/header", "expected columns source,target,score")
        scores = {}
        for row in reader:
            scores[(row["source"], row["target"])] = float(row["score"])
        return cls(scores)

    @classmethod
    def from_csv_file(cls, path) -> "FileProvider":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_csv(fh.read())

    def knows(self, source: str) -> bool:
        return any(s == source for (s, _t) in self._scores)

    def score(self, source: str, target: TargetExamples) -> float:
        try:
            return self._scores[(source, target.task)]
        except KeyError:
            raise UnknownSource(
                f"no stored score for {source!r} -> {target.task!r}"
            ) from None


class EmbeddingProvider:
    """Cosine similarity between stored mean-pooled task embeddings."""

    name = "roe"

    def __init__(self, store: EmbeddingStore):
        self.store = store

    def knows(self, source: str) -> bool:
        return source in self.store

    def score(self, source: str, target: TargetExamples) -> float:
        if source not in self.store:
            raise UnknownSource(f"no embedding for source task {source!r}")
        return cosine(self.store.vector(source), self.store.vector(target.task))


class JudgeProvider:
    """Remote yes/no judge over HTTP.

    The endpoint and bearer token come from TASKWEB_JUDGE_ENDPOINT /
    TASKWEB_JUDGE_TOKEN, which override constructor arguments. Responses are
    cached by (source, target task, example digest); repeated queries never
    touch the wire again within a session. With ``cache_dir`` (or
    TASKWEB_CACHE_DIR) set, the cache also persists across sessions.
    """

    name = "judge"

    def __init__(
        self,
        endpoint: str | None = None,
        token: str | None = None,
        timeout: float = DEFAULT_JUDGE_TIMEOUT,
        retries: int = DEFAULT_JUDGE_RETRIES,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
        prompt_template: str | None = None,
        source_examples: dict | None = None,
        cache_dir: str | None = None,
    ):
        self.endpoint = os.environ.get(ENDPOINT_ENV) or endpoint
        self.token = os.environ.get(TOKEN_ENV) or token
        if not self.endpoint:
            raise ProviderUnavailable(
                f"no judge endpoint configured (set {ENDPOINT_ENV})"
            )
        self.timeout = timeout
        self.retries = retries
        self.prompt_template = prompt_template or default_judge_template()
        self.source_examples = dict(source_examples or {})
        self.cache_dir = os.environ.get(CACHE_DIR_ENV) or cache_dir
        self._cache: dict = {}
        self._cache_lock = threading.Lock()
        self._gate = threading.Semaphore(max_in_flight)

    def _cache_path(self, key: tuple):
        import pathlib

        digest = hashlib.sha256("|".join(key).encode("utf-8")).hexdigest()
        return pathlib.Path(self.cache_dir) / f"judge-{digest}.json"

    def _cache_get(self, key: tuple):
        with self._cache_lock:
            if key in self._cache:
                return self._cache[key]
        if self.cache_dir:
            path = self._cache_path(key)
            if path.exists():
                value = json.loads(path.read_text(encoding="utf-8"))["score"]
                with self._cache_lock:
                    self._cache[key] = value
                return value
        return None

    def _cache_put(self, key: tuple, value: float):
        with self._cache_lock:
            self._cache[key] = value
        if self.cache_dir:
            path = self._cache_path(key)
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps({"score": value}), encoding="utf-8")
            tmp.replace(path)

    def knows(self, source: str) -> bool:
        return True

    def render_prompt(self, source: str, target: TargetExamples) -> str:
        source_examples = "\n".join(self.source_examples.get(source, ())) or f"(task: {source})"
        return self.prompt_template.format(
            source_task=source,
            target_task=target.task,
            source_examples=source_examples,
            target_examples="\n".join(target.examples),
        )

    def _post(self, payload: dict) -> dict:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        last_error = None
        for attempt in range(self.retries + 1):
            try:
                with self._gate:
                    resp = requests.post(
                        self.endpoint, json=payload, headers=headers,
                        timeout=self.timeout,
                    )
                if resp.status_code == 200:
                    return resp.json()
                last_error = f"HTTP {resp.status_code}"
            except requests.RequestException as exc:
                last_error = str(exc)
            if attempt < self.retries:
                time.sleep(0.1 * (attempt + 1))
        raise ProviderUnavailable(
            f"judge endpoint unreachable after {self.retries + 1} attempts: {last_error}"
        )

    def score(self, source: str, target: TargetExamples) -> float:
        key = (source, target.task, target.digest())
        cached = self._cache_get(key)
        if cached is not None:
            return cached
        body = self._post({
            "prompt": self.render_prompt(source, target),
            "answers": ["yes", "no"],
        })
        try:
            probs = body["probabilities"]
            judged = JudgeScore(p_yes=float(probs["yes"]), p_no=float(probs["no"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderUnavailable(f"malformed judge response: {exc}") from exc
        value = judge_normalize(judged)
        self._cache_put(key, value)
        return value


class StubJudgeProvider:
    """Hash-derived pseudo-probabilities; deterministic, fully offline."""

    name = "stub"

    def knows(self, source: str) -> bool:
        return True

    def score(self, source: str, target: TargetExamples) -> float:
        h = hashlib.sha256(
            f"{source}|{target.task}|{target.digest()}".encode("utf-8")
        ).digest()
        p_yes = int.from_bytes(h[:8], "big") / 2**64
        return judge_normalize(JudgeScore(p_yes=p_yes, p_no=1.0 - p_yes))


def default_judge_template() -> str:
    from importlib import resources

    return (
        resources.files("taskweb")
        .joinpath("fixtures_data/judge_prompt_v1.txt")
        .read_text(encoding="utf-8")
    )


def f_score(provider, source: str, target: TargetExamples) -> float:
    """Score one (source, target) pair with any provider. Higher is better."""
    return provider.score(source, target)
