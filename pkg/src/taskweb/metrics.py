"""Per-edge transfer metrics.

Two signals are computed from the per-seed runs of one (source, target,
setup) key and blended into a single edge score:

* ``pc`` is the mean relative change of the evaluation metric over seeds.
* ``pm`` is the fraction of seeds whose transfer strictly beat the baseline.

``combine`` interpolates the two. With the default "signed" scaling, pm is
mapped from [0, 1] onto [-1, 1] first, so the combined score is negative
exactly when the evidence points to harmful transfer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyLog, MixedKeys, NonPositiveBaseline, PmOutOfRange
from .types import SeedRun

PM_SCALINGS = ("raw", "signed")


@dataclass(frozen=True)
class MetricConfig:
    """Interpolation weight on pc, and how pm is rescaled before blending."""

    alpha: float = 0.5
    pm_scaling: str = "signed"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.pm_scaling not in PM_SCALINGS:
            raise ValueError(f"pm_scaling must be one of {PM_SCALINGS}")


DEFAULT_CONFIG = MetricConfig()


def _check_runs(runs: Sequence[SeedRun]) -> None:
    if not runs:
        raise EmptyLog("no runs given")
    key = runs[0].key
    for run in runs:
        if run.key != key:
            raise MixedKeys(f"runs mix keys {key} and {run.key}")


def pc(runs: Sequence[SeedRun]) -> float:
    """Mean percentage change over seeds: (transfer - baseline) / baseline."""
    _check_runs(runs)
    total = 0.0
    for run in runs:
        if run.baseline_metric <= 0:
            raise NonPositiveBaseline(
                f"baseline must be > 0, got {run.baseline_metric} for "
                f"{run.source.id}->{run.target.id} setup {run.setup.id} seed {run.seed}",
                source=run.source.id, target=run.target.id,
                setup=run.setup.id, seed=run.seed,
            )
        total += (run.transfer_metric - run.baseline_metric) / run.baseline_metric
    return total / len(runs)


def pm(runs: Sequence[SeedRun]) -> float:
    """Fraction of seeds with strictly positive transfer. Ties count against."""
    _check_runs(runs)
    wins = sum(1 for run in runs if run.transfer_metric > run.baseline_metric)
    return wins / len(runs)


def scale_pm(pm_val: float, pm_scaling: str) -> float:
    if pm_scaling == "signed":
        return 2.0 * pm_val - 1.0
    return pm_val


def combine(pc_val: float, pm_val: float, cfg: MetricConfig = DEFAULT_CONFIG) -> float:
    """Linear interpolation alpha * pc + (1 - alpha) * scaled(pm)."""
    if not 0.0 <= pm_val <= 1.0:
        raise PmOutOfRange(f"pm must be in [0, 1], got {pm_val}")
    return cfg.alpha * pc_val + (1.0 - cfg.alpha) * scale_pm(pm_val, cfg.pm_scaling)
