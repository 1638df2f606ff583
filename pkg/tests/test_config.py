"""Precedence chain: env > flags > config file > defaults."""

import pytest

from taskweb import config
from taskweb.errors import SchemaViolation


def test_default_when_nothing_given():
    assert config.resolve("lam") == 0.5
    assert config.resolve("jobs") == 1


def test_config_file_beats_default():
    assert config.resolve("lam", file_config={"lam": 0.2}, cast=float) == 0.2


def test_flag_beats_config_file():
    assert config.resolve("lam", flag_value=0.7,
                          file_config={"lam": 0.2}, cast=float) == 0.7


def test_env_beats_flag(monkeypatch):
    monkeypatch.setenv("TASKWEB_JUDGE_ENDPOINT", "http://env.example/j")
    assert config.resolve(
        "judge_endpoint",
        flag_value="http://flag.example/j",
        file_config={"judge_endpoint": "http://file.example/j"},
    ) == "http://env.example/j"


def test_env_ignored_when_unset(monkeypatch):
    monkeypatch.delenv("TASKWEB_JUDGE_ENDPOINT", raising=False)
    assert config.resolve("judge_endpoint",
                          flag_value="http://flag.example/j") == "http://flag.example/j"


def test_cache_dir_env(monkeypatch):
    monkeypatch.setenv("TASKWEB_CACHE_DIR", "/tmp/tw-cache")
    assert config.resolve("cache_dir") == "/tmp/tw-cache"


def test_cast_applies():
    assert config.resolve("jobs", flag_value="4", cast=int) == 4


def test_load_config_file(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text('lam = 0.3\njobs = 2\npm_scaling = "raw"\n')
    loaded = config.load_config_file(path)
    assert loaded == {"lam": 0.3, "jobs": 2, "pm_scaling": "raw"}
    bad = tmp_path / "bad.toml"
    bad.write_text("not toml ===")
    with pytest.raises(SchemaViolation):
        config.load_config_file(bad)
