import pytest

from taskweb.errors import (
    BadReplaceCount,
    DuplicateTask,
    LeakDetected,
    Overlap,
    PoolTooSmall,
    SchemaViolation,
    UnknownTask,
)
from taskweb.trainset import (
    ExamplePool,
    build_manifest,
    load_manifest,
    load_pool,
    mix_manifest,
)


def make_pool(task: str, size: int) -> ExamplePool:
    return ExamplePool(
        task=task,
        examples=tuple(
            {"id": f"{task}-{i}", "prompt": f"prompt {task} {i}", "answer": f"ans {i}"}
            for i in range(size)
        ),
    )


def pools_for(tasks, size=2500):
    return {t: make_pool(t, size) for t in tasks}


def test_five_tasks_two_thousand_each():
    tasks = [f"task{i}" for i in range(5)]
    manifest = build_manifest("tgt", tasks, pools_for(tasks), 2000, seed=13)
    assert len(manifest.rows) == 10_000
    assert manifest.tasks() == tasks
    counts = {}
    for row in manifest.rows:
        counts[row["task"]] = counts.get(row["task"], 0) + 1
    assert set(counts.values()) == {2000}


def test_manifest_is_byte_deterministic():
    tasks = ["a", "b", "c"]
    pools = pools_for(tasks, 50)
    m1 = build_manifest("tgt", tasks, pools, 10, seed=7)
    m2 = build_manifest("tgt", tasks, pools, 10, seed=7)
    assert m1.to_jsonl() == m2.to_jsonl()
    m3 = build_manifest("tgt", tasks, pools, 10, seed=8)
    assert m3.to_jsonl() != m1.to_jsonl()


def test_twentyone_tasks_recipe():
    tasks = [f"task{i:02d}" for i in range(21)]
    manifest = build_manifest("tgt", tasks, pools_for(tasks, 2000), 2000, seed=1)
    assert len(manifest.rows) == 42_000


def test_sampling_without_replacement():
    tasks = ["a"]
    manifest = build_manifest("tgt", tasks, pools_for(tasks, 30), 30, seed=3)
    ids = [row["example_id"] for row in manifest.rows]
    assert len(ids) == len(set(ids)) == 30


def test_adding_task_never_perturbs_others():
    pools = pools_for(["a", "b", "c"], 100)
    small = build_manifest("tgt", ["a", "b"], pools, 20, seed=5)
    big = build_manifest("tgt", ["a", "b", "c"], pools, 20, seed=5)
    assert small.rows == big.rows[:40]


def test_pool_too_small():
    with pytest.raises(PoolTooSmall) as exc:
        build_manifest("tgt", ["a"], pools_for(["a"], 5), 10, seed=0)
    assert exc.value.details == {"task": "a", "have": 5, "need": 10}


def test_duplicate_and_unknown_tasks():
    pools = pools_for(["a"], 10)
    with pytest.raises(DuplicateTask):
        build_manifest("tgt", ["a", "a"], pools, 2, seed=0)
    with pytest.raises(UnknownTask):
        build_manifest("tgt", ["zz"], pools, 2, seed=0)


def test_target_leakage_guard():
    pools = pools_for(["a", "tgt"], 10)
    with pytest.raises(LeakDetected):
        build_manifest("tgt", ["a", "tgt"], pools, 2, seed=0)


def test_pool_rejects_duplicate_ids():
    with pytest.raises(SchemaViolation):
        ExamplePool(task="a", examples=(
            {"id": "x", "prompt": "p", "answer": "y"},
            {"id": "x", "prompt": "q", "answer": "z"},
        ))


def test_mix_manifest_endpoints():
    top = ["a", "b", "c"]
    bottom = ["x", "y", "z"]
    pools = pools_for(top + bottom, 40)
    none_replaced = mix_manifest("tgt", top, bottom, 0, pools, 10, seed=2)
    assert none_replaced.rows == build_manifest("tgt", top, pools, 10, seed=2).rows
    all_replaced = mix_manifest("tgt", top, bottom, 3, pools, 10, seed=2)
    assert all_replaced.rows == build_manifest("tgt", bottom, pools, 10, seed=2).rows


def test_mix_manifest_partial():
    top = [f"top{i}" for i in range(5)]
    bottom = [f"bot{i}" for i in range(5)]
    pools = pools_for(top + bottom, 2100)
    mixed = mix_manifest("tgt", top, bottom, 2, pools, 2000, seed=4)
    assert len(mixed.rows) == 10_000
    assert mixed.tasks() == top[:3] + bottom[:2]
    assert mixed.recipe["replaced"] == 2


def test_mix_size_invariant_across_replace_counts():
    top = [f"top{i}" for i in range(5)]
    bottom = [f"bot{i}" for i in range(5)]
    pools = pools_for(top + bottom, 50)
    sizes = {
        len(mix_manifest("tgt", top, bottom, rc, pools, 20, seed=6).rows)
        for rc in range(6)
    }
    assert sizes == {100}


def test_mix_manifest_errors():
    pools = pools_for(["a", "b", "x", "y"], 10)
    with pytest.raises(Overlap):
        mix_manifest("tgt", ["a", "b"], ["b", "y"], 1, pools, 2, seed=0)
    with pytest.raises(BadReplaceCount):
        mix_manifest("tgt", ["a", "b"], ["x", "y"], 3, pools, 2, seed=0)
    with pytest.raises(BadReplaceCount):
        mix_manifest("tgt", ["a", "b"], ["x"], 1, pools, 2, seed=0)


def test_manifest_file_roundtrip(tmp_path):
    tasks = ["a", "b"]
    manifest = build_manifest("tgt", tasks, pools_for(tasks, 30), 5, seed=9,
                              method="top_k")
    path = tmp_path / "train.jsonl"
    path.write_text(manifest.to_jsonl(), encoding="utf-8")
    loaded = load_manifest(path)
    assert loaded.target == "tgt"
    assert loaded.recipe == manifest.recipe
    assert loaded.rows == manifest.rows


def test_load_pool_file(tmp_path):
    path = tmp_path / "a.jsonl"
    path.write_text(
        '{"id": "1", "prompt": "p1", "answer": "a1"}\n'
        '{"id": "2", "prompt": "p2", "answer": "a2"}\n',
        encoding="utf-8",
    )
    pool = load_pool(path, "a")
    assert len(pool) == 2
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"prompt": "no id"}\n', encoding="utf-8")
    with pytest.raises(SchemaViolation):
        load_pool(bad, "bad")
