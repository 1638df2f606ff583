"""Command-line entry point: the ``taskshop`` tool.

Domain failures print a machine-readable JSON object on stderr and exit 1;
usage errors exit 2. Subcommands are pure pipelines: identical inputs,
flags and seeds produce byte-identical outputs.
"""

from __future__ import annotations

import csv
import functools
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import __version__, config, core, registry, structure, webio
from ._kernels import backend_name
from .errors import TaskWebError, UnknownTask
from .evaluation import loo_evaluate
from .fixtures import write_fixtures
from .similarity import (
    EmbeddingProvider,
    EmbeddingStore,
    FileProvider,
    JudgeProvider,
    StubJudgeProvider,
    load_target_examples,
)
from .taskshop import TaskShopConfig, rank_sources, select_bottom_k, select_top_k
from .trainset import build_manifest, load_pool, mix_manifest
from .webio import SCHEMA_VERSION, load_web_file, save_web_file

EMBEDDINGS_VERSION = 1
MANIFEST_VERSION = 1
REPORT_VERSION = 1


def _print_version(ctx, _param, value):
    if not value or ctx.resilient_parsing:
        return
    click.echo(f"taskshop {__version__}")
    click.echo(f"web schema version: {SCHEMA_VERSION}")
    click.echo(f"embedding file version: {EMBEDDINGS_VERSION}")
    click.echo(f"manifest version: {MANIFEST_VERSION}")
    click.echo(f"report version: {REPORT_VERSION}")
    click.echo(f"kernel backend: {backend_name()}")
    ctx.exit(0)


def domain_errors(fn):
    """Convert TaskWebError into a JSON diagnostic on stderr and exit 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TaskWebError as exc:
            sys.stderr.write(json.dumps(exc.to_json(), sort_keys=True) + "\n")
            sys.exit(1)

    return wrapper


def _emit(payload: dict, out: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _file_config(ctx) -> dict:
    return (ctx.obj or {}).get("file_config", {})


@click.group()
@click.option("--version", is_flag=True, callback=_print_version,
              expose_value=False, is_eager=True,
              help="Print tool and file-format versions.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="TOML config file overlay.")
@click.pass_context
def main(ctx, config_path):
    """Transfer-graph analytics and source-task selection."""
    ctx.ensure_object(dict)
    ctx.obj["file_config"] = config.load_config_file(config_path) if config_path else {}


@main.command()
@click.option("--runs", "runs_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Experiment log CSV.")
@click.option("--alpha", type=float, default=None, help="Weight on pc in the combined score.")
@click.option("--pm-scaling", type=click.Choice(["raw", "signed"]), default=None)
@click.option("--tasks", "tasks_sidecar", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Sidecar JSON for task ids not in the registry.")
@click.option("--setups", "setups_sidecar", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Sidecar JSON for setup ids not in the registry.")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.pass_context
@domain_errors
def ingest(ctx, runs_path, alpha, pm_scaling, tasks_sidecar, setups_sidecar, out):
    """Aggregate a per-seed experiment log into a graph document."""
    cfg = _file_config(ctx)
    alpha = config.resolve("alpha", alpha, cfg, float)
    pm_scaling = config.resolve("pm_scaling", pm_scaling, cfg, str)
    extra_tasks = registry.load_task_sidecar(tasks_sidecar) if tasks_sidecar else None
    extra_setups = registry.load_setup_sidecar(setups_sidecar) if setups_sidecar else None
    runs = webio.read_runs_csv_file(
        runs_path,
        registry.task_resolver(extra_tasks),
        registry.setup_resolver(extra_setups),
    )
    graph = core.ingest_runs(runs, alpha=alpha, pm_scaling=pm_scaling)
    save_web_file(graph, out)
    click.echo(f"wrote {out}: {len(graph.tasks)} tasks, {len(graph.cells)} cells")


@main.group()
def analyze():
    """Structural analyses of a graph."""


@analyze.command()
@click.option("--web", "web_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--view", default="averaged", show_default=True,
              help='"averaged" or a setup id.')
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@domain_errors
def commute(web_path, view, out):
    """Sign agreement between the two directions of each pair."""
    graph = load_web_file(web_path)
    report = structure.commutativity(graph, view=view)
    _emit(report.to_json(), out)


@analyze.command()
@click.option("--web", "web_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--thresholds", required=True,
              help="start:stop:step, e.g. 0.01:0.05:0.01")
@click.option("--view", default="averaged", show_default=True)
@click.option("--jobs", type=int, default=None, help="Worker threads over thresholds.")
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@click.option("--csv", "csv_out", default=None, type=click.Path(dir_okay=False),
              help="Also write the curve as CSV for plotting.")
@click.pass_context
@domain_errors
def transitive(ctx, web_path, thresholds, view, jobs, out, csv_out):
    """Positive-closure rate of pivot triples per hop threshold."""
    graph = load_web_file(web_path)
    grid = structure.parse_threshold_range(thresholds)
    jobs = config.resolve("jobs", jobs, _file_config(ctx), int)
    if jobs > 1 and len(grid) > 1:
        chunks = [grid[i::jobs] for i in range(jobs)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            partials = list(pool.map(
                lambda c: structure.transitivity_curve(graph, c, view=view),
                [c for c in chunks if c],
            ))
        merged = {}
        for part in partials:
            for t, e, f in zip(part.thresholds, part.eligible_triples,
                               part.positive_fraction):
                merged[t] = (e, f)
        curve = structure.TransitivityCurve(
            thresholds=tuple(sorted(merged)),
            eligible_triples=tuple(merged[t][0] for t in sorted(merged)),
            positive_fraction=tuple(merged[t][1] for t in sorted(merged)),
        )
    else:
        curve = structure.transitivity_curve(graph, grid, view=view)
    _emit(curve.to_json(), out)
    if csv_out:
        with open(csv_out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["threshold", "eligible_triples", "positive_fraction"])
            for t, e, f in zip(curve.thresholds, curve.eligible_triples,
                               curve.positive_fraction):
                writer.writerow([t, e, "" if f is None else f])


@main.command("setup-sim")
@click.option("--web", "web_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@domain_errors
def setup_sim(web_path, out):
    """Pearson similarity between per-setup score matrices."""
    graph = load_web_file(web_path)
    setup_ids, matrix = core.setup_similarity(graph)
    _emit({
        "setups": setup_ids,
        "matrix": [[float(v) for v in row] for row in matrix],
    }, out)


def _build_provider(name, similarities, embeddings, endpoint, token, timeout,
                    retries, file_config):
    if name == "file":
        if not similarities:
            raise UnknownTask("--similarities is required for the file provider")
        return FileProvider.from_csv_file(similarities)
    if name == "roe":
        if not embeddings:
            raise UnknownTask("--embeddings is required for the roe provider")
        return EmbeddingProvider(EmbeddingStore.from_file(embeddings))
    if name == "judge":
        return JudgeProvider(
            endpoint=config.resolve("judge_endpoint", endpoint, file_config),
            token=config.resolve("judge_token", token, file_config),
            timeout=config.resolve("judge_timeout", timeout, file_config, float),
            retries=config.resolve("judge_retries", retries, file_config, int),
            cache_dir=config.resolve("cache_dir", None, file_config),
        )
    return StubJudgeProvider()


def provider_options(fn):
    fn = click.option("--provider", "provider_name", required=True,
                      type=click.Choice(["file", "roe", "judge", "stub"]))(fn)
    fn = click.option("--similarities", type=click.Path(exists=True, dir_okay=False),
                      default=None, help="CSV source,target,score (file provider).")(fn)
    fn = click.option("--embeddings", type=click.Path(exists=True, dir_okay=False),
                      default=None, help="Embedding JSONL (roe provider).")(fn)
    fn = click.option("--judge-endpoint", default=None)(fn)
    fn = click.option("--judge-token", default=None)(fn)
    fn = click.option("--judge-timeout", type=float, default=None)(fn)
    fn = click.option("--judge-retries", type=int, default=None)(fn)
    return fn


def _ranking(ctx, web_path, target_path, provider_name, similarities, embeddings,
             judge_endpoint, judge_token, judge_timeout, judge_retries, lam,
             allow_seen):
    cfg = _file_config(ctx)
    graph = load_web_file(web_path)
    target = load_target_examples(target_path)
    provider = _build_provider(provider_name, similarities, embeddings,
                               judge_endpoint, judge_token, judge_timeout,
                               judge_retries, cfg)
    lam = config.resolve("lam", lam, cfg, float)
    result = rank_sources(target, graph, provider,
                          TaskShopConfig(lam=lam), allow_seen=allow_seen)
    return result, lam


@main.command()
@click.option("--web", "web_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--target", "target_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Target examples JSONL.")
@provider_options
@click.option("--lambda", "lam", type=float, default=None,
              help="Weight on the pivot-path mean.")
@click.option("--allow-seen", is_flag=True, default=False,
              help="Permit targets that already have scores in the graph.")
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@click.pass_context
@domain_errors
def score(ctx, web_path, target_path, provider_name, similarities, embeddings,
          judge_endpoint, judge_token, judge_timeout, judge_retries, lam,
          allow_seen, out):
    """Rank every source task for an unseen target."""
    result, lam = _ranking(ctx, web_path, target_path, provider_name, similarities,
                           embeddings, judge_endpoint, judge_token, judge_timeout,
                           judge_retries, lam, allow_seen)
    _emit({**result.to_json(), "lambda": lam}, out)


@main.command()
@click.option("--web", "web_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--target", "target_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@provider_options
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--k", type=int, required=True)
@click.option("--bottom", is_flag=True, default=False,
              help="Select the k worst sources instead of the k best.")
@click.option("--allow-seen", is_flag=True, default=False)
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@click.pass_context
@domain_errors
def select(ctx, web_path, target_path, provider_name, similarities, embeddings,
           judge_endpoint, judge_token, judge_timeout, judge_retries, lam, k,
           bottom, allow_seen, out):
    """Pick the top-k (or bottom-k) sources for a target."""
    result, lam = _ranking(ctx, web_path, target_path, provider_name, similarities,
                           embeddings, judge_endpoint, judge_token, judge_timeout,
                           judge_retries, lam, allow_seen)
    chosen = select_bottom_k(result, k) if bottom else select_top_k(result, k)
    _emit({
        **result.to_json(),
        "lambda": lam,
        "k": k,
        "direction": "bottom" if bottom else "top",
        "selected": chosen,
    }, out)


@main.command()
@click.option("--web", "web_path", required=True, type=click.Path(exists=True, dir_okay=False))
@provider_options
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--k", "k_values", type=int, multiple=True, default=(5,),
              show_default=True, help="Regret cutoffs; repeatable.")
@click.option("--examples-dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="Directory of <task>.jsonl target example files.")
@click.option("--jobs", type=int, default=None)
@click.option("--report", "report_path", default=None, type=click.Path(dir_okay=False))
@click.pass_context
@domain_errors
def evaluate(ctx, web_path, provider_name, similarities, embeddings, judge_endpoint,
             judge_token, judge_timeout, judge_retries, lam, k_values, examples_dir,
             jobs, report_path):
    """Score TaskShop and the bare provider leave-one-out, per category."""
    cfg = _file_config(ctx)
    graph = load_web_file(web_path)
    provider = _build_provider(provider_name, similarities, embeddings,
                               judge_endpoint, judge_token, judge_timeout,
                               judge_retries, cfg)
    lam = config.resolve("lam", lam, cfg, float)
    jobs = config.resolve("jobs", jobs, cfg, int)

    examples = {}
    if examples_dir:
        for path in sorted(Path(examples_dir).glob("*.jsonl")):
            ex = load_target_examples(path)
            examples[ex.task] = ex

    shop_cfg = TaskShopConfig(lam=lam)

    def taskshop_method(masked, target_examples):
        result = rank_sources(target_examples, masked, provider, shop_cfg,
                              skip_unscorable=True)
        return [s for s, _v in result.ranked]

    def provider_method(masked, target_examples):
        candidates = [s for s in masked.source_ids() if s != target_examples.task]
        scored = [(s, provider.score(s, target_examples)) for s in candidates]
        return [s for s, _v in sorted(scored, key=lambda sv: (-sv[1], sv[0]))]

    reports = {}
    for name, method in (
        (f"taskshop_{provider.name}", taskshop_method),
        (provider.name, provider_method),
    ):
        reports[name] = loo_evaluate(
            graph, method, k_values=k_values, examples=examples,
            method_name=name, jobs=jobs,
        )
    _emit({
        "version": REPORT_VERSION,
        "lambda": lam,
        "gain": "linear",
        "methods": {name: rep.to_json() for name, rep in reports.items()},
    }, report_path)


@main.command("build-trainset")
@click.option("--web", "web_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--target-examples", "target_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@provider_options
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--per-task", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--pools-dir", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory of <task>.jsonl example pools.")
@click.option("--bottom", is_flag=True, default=False)
@click.option("--random", "random_pick", is_flag=True, default=False,
              help="Pick k tasks uniformly at random instead of by score.")
@click.option("--mix-replace", type=int, default=None,
              help="Replace the last N top tasks with the first N bottom tasks.")
@click.option("--tasks", "explicit_tasks", default=None,
              help="Comma-separated explicit task list (skips ranking).")
@click.option("--allow-seen", is_flag=True, default=False)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.pass_context
@domain_errors
def build_trainset(ctx, web_path, target_path, provider_name, similarities,
                   embeddings, judge_endpoint, judge_token, judge_timeout,
                   judge_retries, lam, k, per_task, seed, pools_dir, bottom,
                   random_pick, mix_replace, explicit_tasks, allow_seen, out):
    """Assemble a balanced multi-task training manifest for a target."""
    target = load_target_examples(target_path)

    if explicit_tasks:
        chosen = [t.strip() for t in explicit_tasks.split(",") if t.strip()]
        method = "explicit"
    else:
        result, lam = _ranking(ctx, web_path, target_path, provider_name,
                               similarities, embeddings, judge_endpoint,
                               judge_token, judge_timeout, judge_retries, lam,
                               allow_seen)
        if random_pick:
            import numpy as np

            rng = np.random.Generator(np.random.Philox(key=seed))
            pool = [s for s, _v in result.ranked]
            chosen = [pool[i] for i in rng.permutation(len(pool))[:k]]
            method = "random"
        elif mix_replace is not None:
            top = select_top_k(result, k)
            bot = select_bottom_k(result, k)
            method = "mix"
            chosen = None
        elif bottom:
            chosen = select_bottom_k(result, k)
            method = "bottom_k"
        else:
            chosen = select_top_k(result, k)
            method = "top_k"

    def pool_for(task):
        path = Path(pools_dir) / f"{task}.jsonl"
        if not path.exists():
            raise UnknownTask(f"no pool file for task {task!r} in {pools_dir}")
        return load_pool(path, task)

    if explicit_tasks or mix_replace is None:
        pools = {t: pool_for(t) for t in chosen}
        manifest = build_manifest(target.task, chosen, pools, per_task, seed,
                                  method=method)
    else:
        pools = {t: pool_for(t) for t in dict.fromkeys(top + bot)}
        manifest = mix_manifest(target.task, top, bot, mix_replace, pools,
                                per_task, seed)
    Path(out).write_text(manifest.to_jsonl(), encoding="utf-8")
    click.echo(f"wrote {out}: {len(manifest.rows)} rows from {len(manifest.tasks())} tasks")


@main.command("fixtures")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@domain_errors
def fixtures_cmd(out):
    """Write the bundled published-score fixture and demo assets."""
    for path in write_fixtures(out):
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
