"""Facts the bundled fixture graph must reproduce."""

import pytest

from taskweb.core import positivity_report
from taskweb.evaluation import MaskedGraph
from taskweb.fixtures import asset_path, published_web, write_fixtures
from taskweb.similarity import EmbeddingProvider, EmbeddingStore, load_target_examples
from taskweb.structure import commutativity, transitivity_curve
from taskweb.taskshop import TaskShopConfig, rank_sources, select_top_k
from taskweb.webio import load_web, load_web_file, save_web


def test_shape(published):
    assert len(published.tasks) == 22
    assert published.setup_ids() == ["avg7"]
    assert len(published.cells) == 441
    categories = {}
    for task in published.tasks.values():
        categories.setdefault(task.category, []).append(task.id)
    assert len(categories["nli"]) == 6
    assert len(categories["commonsense"]) == 7


def test_squad2_is_source_only(published):
    assert not published.tasks["squad2"].is_target
    assert all(t != "squad2" for (_s, t, _su) in published.cells)
    assert sum(1 for (s, _t, _su) in published.cells if s == "squad2") == 21


def test_sign_tallies(published):
    assert positivity_report(published) == {
        "positive": 246, "negative": 136, "zero": 59, "total": 441,
    }


def test_pair_agreement_tallies(published):
    report = commutativity(published)
    assert report.pairs_total == 210
    assert report.same_sign == 97
    assert report.opposite_sign == 113
    assert report.zero_count == 0


def test_named_edge_scores(published):
    assert published.avg_score("cosmosqa", "socialiqa") == pytest.approx(0.15, abs=1e-9)
    assert published.avg_score("qqp", "cosmosqa") == pytest.approx(-0.12, abs=1e-9)
    assert published.avg_score("socialiqa", "rte") == pytest.approx(0.10, abs=1e-9)


def test_transitivity_window(published):
    curve = transitivity_curve(published, [0.01, 0.02, 0.03, 0.04])
    assert curve.positive_fraction[0] == pytest.approx(0.88, abs=0.02)
    assert curve.positive_fraction[-1] == pytest.approx(0.97, abs=0.02)
    fractions = [f for f in curve.positive_fraction if f is not None]
    assert fractions == sorted(fractions)


def test_copa_top5_with_demo_embeddings(published):
    store = EmbeddingStore.from_file(asset_path("embeddings_demo.jsonl"))
    target = load_target_examples(asset_path("copa_examples.jsonl"))
    assert target.task == "copa"
    assert 1 <= len(target.examples) <= 32
    masked = MaskedGraph(published, "copa")
    result = rank_sources(target, masked, EmbeddingProvider(store),
                          TaskShopConfig(lam=0.5))
    assert set(select_top_k(result, 5)) == {
        "cosmosqa", "socialiqa", "winogrande", "hellaswag", "piqa",
    }
    assert masked.leak_attempts == 0
    # the visible-graph ranking never reads target-incident edges either
    unmasked = rank_sources(target, published, EmbeddingProvider(store),
                            TaskShopConfig(lam=0.5), allow_seen=True)
    assert unmasked.ranked == result.ranked


def test_fixture_roundtrip_and_write(published, tmp_path):
    assert load_web(save_web(published)) == published
    written = write_fixtures(tmp_path)
    names = {p.name for p in written}
    assert "web_avg7.json" in names and "embeddings_demo.jsonl" in names
    assert load_web_file(tmp_path / "web_avg7.json") == published


def test_embeddings_cover_all_tasks(published):
    store = EmbeddingStore.from_file(asset_path("embeddings_demo.jsonl"))
    assert store.tasks() == sorted(published.tasks)
    assert store.dim == 16
