import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from taskweb.errors import (
    BothZero,
    DimensionMismatch,
    EmptyInput,
    ProviderUnavailable,
    SchemaViolation,
    UnknownSource,
    UnknownTask,
)
from taskweb.similarity import (
    EmbeddingProvider,
    EmbeddingStore,
    FileProvider,
    JudgeProvider,
    JudgeScore,
    StubJudgeProvider,
    TargetExamples,
    cosine,
    f_score,
    judge_normalize,
    roe_pool,
)

TARGET = TargetExamples(task="t", examples=("example one", "example two"))


def store_from(vectors: dict) -> EmbeddingStore:
    lines = [
        json.dumps({"task": k, "dim": len(v), "n_pooled": 4, "vector": list(v)})
        for k, v in vectors.items()
    ]
    return EmbeddingStore.from_jsonl("\n".join(lines))


def test_target_examples_bounds():
    with pytest.raises(ValueError):
        TargetExamples(task="t", examples=())
    with pytest.raises(ValueError):
        TargetExamples(task="t", examples=tuple(str(i) for i in range(33)))


def test_file_provider_lookup():
    provider = FileProvider({("s", "t"): 0.4})
    assert f_score(provider, "s", TARGET) == 0.4


def test_file_provider_unknown_pair():
    provider = FileProvider({("s", "other"): 0.4})
    with pytest.raises(UnknownSource):
        f_score(provider, "s", TARGET)


def test_file_provider_csv_roundtrip(tmp_path):
    path = tmp_path / "sim.csv"
    path.write_text("source,target,score\ns,t,0.4\nu,t,-0.2\n")
    provider = FileProvider.from_csv_file(path)
    assert provider.score("u", TARGET) == -0.2
    bad = tmp_path / "bad.csv"
    bad.write_text("src,tgt,val\na,b,1\n")
    with pytest.raises(SchemaViolation):
        FileProvider.from_csv_file(bad)


def test_embedding_cosine():
    provider = EmbeddingProvider(store_from({"s": (1.0, 0.0), "t": (1.0, 1.0)}))
    assert f_score(provider, "s", TARGET) == pytest.approx(0.7071067811865475, abs=1e-9)


def test_embedding_identical_vectors():
    provider = EmbeddingProvider(store_from({"s": (0.3, 0.4), "t": (0.3, 0.4)}))
    assert f_score(provider, "s", TARGET) == pytest.approx(1.0)


def test_embedding_unknown_source_and_target():
    provider = EmbeddingProvider(store_from({"s": (1.0, 0.0), "t": (0.0, 1.0)}))
    with pytest.raises(UnknownSource):
        provider.score("nope", TARGET)
    with pytest.raises(UnknownTask):
        provider.score("s", TargetExamples(task="missing", examples=("x",)))


def test_embedding_store_rejects_mixed_dims():
    with pytest.raises(DimensionMismatch):
        store_from({"a": (1.0, 0.0), "b": (1.0, 0.0, 0.0)})


def test_embedding_scale_invariance():
    rng = np.random.default_rng(0)
    v_s = rng.normal(size=8)
    v_t = rng.normal(size=8)
    base = cosine(v_s, v_t)
    for c in (0.1, 3.0, 250.0):
        assert cosine(c * v_s, v_t) == pytest.approx(base, abs=1e-12)
        assert cosine(v_s, c * v_t) == pytest.approx(base, abs=1e-12)


def test_cosine_zero_vector():
    with pytest.raises(EmptyInput):
        cosine((0.0, 0.0), (1.0, 0.0))


def test_roe_pool_mean():
    assert roe_pool([(1.0, 0.0), (0.0, 1.0)]).tolist() == [0.5, 0.5]
    assert roe_pool([(2.0, 2.0), (0.0, 0.0), (1.0, 1.0)]).tolist() == [1.0, 1.0]


def test_roe_pool_single_vector_identity():
    assert roe_pool([(0.2, 0.8)]).tolist() == [0.2, 0.8]


def test_roe_pool_errors():
    with pytest.raises(EmptyInput):
        roe_pool([])
    with pytest.raises(DimensionMismatch):
        roe_pool([(1.0,), (1.0, 2.0)])


def test_judge_normalize():
    assert judge_normalize(JudgeScore(0.9, 0.1)) == pytest.approx(0.9)
    assert judge_normalize(JudgeScore(0.4, 0.4)) == 0.5
    assert judge_normalize(JudgeScore(0.7, 0.0)) == 1.0
    with pytest.raises(BothZero):
        judge_normalize(JudgeScore(0.0, 0.0))
    with pytest.raises(ValueError):
        JudgeScore(-0.1, 0.5)


def test_judge_normalize_monotone_in_p_yes():
    values = [judge_normalize(JudgeScore(p, 0.3)) for p in (0.0, 0.2, 0.5, 2.0)]
    assert values == sorted(values)


def test_stub_judge_deterministic():
    stub = StubJudgeProvider()
    a = stub.score("s", TARGET)
    b = stub.score("s", TARGET)
    assert a == b
    assert 0.0 <= a <= 1.0
    assert stub.score("other", TARGET) != a


# --- remote judge -----------------------------------------------------------

class _JudgeHandler(BaseHTTPRequestHandler):
    hits = 0
    fail_first = 0

    def do_POST(self):
        cls = type(self)
        cls.hits += 1
        if cls.fail_first > 0:
            cls.fail_first -= 1
            self.send_response(500)
            self.end_headers()
            return
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        assert body["answers"] == ["yes", "no"]
        assert self.headers.get("Authorization") == "Bearer sekrit"
        payload = json.dumps({"probabilities": {"yes": 0.8, "no": 0.2}}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *_args):
        pass


@pytest.fixture()
def judge_server():
    _JudgeHandler.hits = 0
    _JudgeHandler.fail_first = 0
    server = HTTPServer(("127.0.0.1", 0), _JudgeHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/judge"
    server.shutdown()
    thread.join()


def test_judge_provider_scores_and_caches(judge_server, monkeypatch):
    monkeypatch.delenv("TASKWEB_JUDGE_ENDPOINT", raising=False)
    monkeypatch.delenv("TASKWEB_JUDGE_TOKEN", raising=False)
    provider = JudgeProvider(endpoint=judge_server, token="sekrit")
    assert provider.score("s", TARGET) == pytest.approx(0.8)
    assert _JudgeHandler.hits == 1
    # cached: same (source, target, examples) never hits the wire again
    assert provider.score("s", TARGET) == pytest.approx(0.8)
    assert _JudgeHandler.hits == 1
    provider.score("s2", TARGET)
    assert _JudgeHandler.hits == 2
    # different example set busts the cache key
    provider.score("s", TargetExamples(task="t", examples=("changed",)))
    assert _JudgeHandler.hits == 3


def test_judge_provider_retries_then_succeeds(judge_server, monkeypatch):
    monkeypatch.delenv("TASKWEB_JUDGE_ENDPOINT", raising=False)
    monkeypatch.delenv("TASKWEB_JUDGE_TOKEN", raising=False)
    _JudgeHandler.fail_first = 1
    provider = JudgeProvider(endpoint=judge_server, token="sekrit", retries=2)
    assert provider.score("s", TARGET) == pytest.approx(0.8)
    assert _JudgeHandler.hits == 2


def test_judge_provider_unreachable(monkeypatch):
    monkeypatch.delenv("TASKWEB_JUDGE_ENDPOINT", raising=False)
    provider = JudgeProvider(endpoint="http://127.0.0.1:1/judge",
                             token=None, retries=0, timeout=0.2)
    with pytest.raises(ProviderUnavailable):
        provider.score("s", TARGET)


def test_judge_env_overrides_argument(judge_server, monkeypatch):
    monkeypatch.setenv("TASKWEB_JUDGE_ENDPOINT", judge_server)
    monkeypatch.setenv("TASKWEB_JUDGE_TOKEN", "sekrit")
    provider = JudgeProvider(endpoint="http://127.0.0.1:1/ignored", token="wrong")
    assert provider.endpoint == judge_server
    assert provider.score("s", TARGET) == pytest.approx(0.8)


def test_judge_requires_endpoint(monkeypatch):
    monkeypatch.delenv("TASKWEB_JUDGE_ENDPOINT", raising=False)
    with pytest.raises(ProviderUnavailable):
        JudgeProvider()


def test_judge_disk_cache_survives_sessions(judge_server, monkeypatch, tmp_path):
    monkeypatch.delenv("TASKWEB_JUDGE_ENDPOINT", raising=False)
    monkeypatch.setenv("TASKWEB_CACHE_DIR", str(tmp_path / "cache"))
    first = JudgeProvider(endpoint=judge_server, token="sekrit")
    assert first.score("s", TARGET) == pytest.approx(0.8)
    assert _JudgeHandler.hits == 1
    # a fresh provider instance finds the persisted entry, never hits the wire
    second = JudgeProvider(endpoint=judge_server, token="sekrit")
    assert second.score("s", TARGET) == pytest.approx(0.8)
    assert _JudgeHandler.hits == 1


def test_judge_prompt_contains_examples(judge_server, monkeypatch):
    monkeypatch.delenv("TASKWEB_JUDGE_ENDPOINT", raising=False)
    provider = JudgeProvider(endpoint=judge_server,
                             source_examples={"s": ["source sample"]})
    prompt = provider.render_prompt("s", TARGET)
    assert "source sample" in prompt
    assert "example one" in prompt
    assert prompt.count("yes") >= 1
