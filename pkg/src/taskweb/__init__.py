"""taskweb: pairwise task-transfer graph analytics and source-task selection."""

from ._kernels import backend_name
from .core import avg_score, ingest_runs, positivity_report, setup_similarity
from .evaluation import MaskedGraph, loo_evaluate, ndcg, regret_at_k
from .metrics import MetricConfig, combine, pc, pm
from .similarity import (
    EmbeddingProvider,
    EmbeddingStore,
    FileProvider,
    JudgeProvider,
    JudgeScore,
    StubJudgeProvider,
    TargetExamples,
    f_score,
    judge_normalize,
    roe_pool,
)
from .structure import commutativity, transitivity_curve
from .taskshop import (
    SelectionResult,
    TaskShopConfig,
    rank_sources,
    select_bottom_k,
    select_top_k,
    taskshop_score,
)
from .trainset import ExamplePool, TrainingManifest, build_manifest, mix_manifest
from .types import SeedRun, SetupId, TaskId, TaskWebGraph, TransferCell
from .webio import load_web, load_web_file, save_web, save_web_file

__version__ = "0.1.0"

__all__ = [
    "EmbeddingProvider",
    "EmbeddingStore",
    "ExamplePool",
    "FileProvider",
    "JudgeProvider",
    "JudgeScore",
    "MaskedGraph",
    "MetricConfig",
    "SeedRun",
    "SelectionResult",
    "SetupId",
    "StubJudgeProvider",
    "TargetExamples",
    "TaskId",
    "TaskShopConfig",
    "TaskWebGraph",
    "TrainingManifest",
    "TransferCell",
    "avg_score",
    "backend_name",
    "build_manifest",
    "combine",
    "commutativity",
    "f_score",
    "ingest_runs",
    "judge_normalize",
    "load_web",
    "load_web_file",
    "loo_evaluate",
    "mix_manifest",
    "ndcg",
    "pc",
    "pm",
    "positivity_report",
    "rank_sources",
    "regret_at_k",
    "roe_pool",
    "save_web",
    "save_web_file",
    "select_bottom_k",
    "select_top_k",
    "setup_similarity",
    "taskshop_score",
    "transitivity_curve",
]
