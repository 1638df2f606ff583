"""Layered runtime configuration.

Precedence, highest first: environment variables, then command-line flags,
then the optional TOML config file, then built-in defaults. Flags passed as
None count as "not given" so lower layers can fill them in.
"""

from __future__ import annotations

import os
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import SchemaViolation

ENV_VARS = {
    "judge_endpoint": "TASKWEB_JUDGE_ENDPOINT",
    "judge_token": "TASKWEB_JUDGE_TOKEN",
    "cache_dir": "TASKWEB_CACHE_DIR",
}

DEFAULTS = {
    "alpha": 0.5,
    "pm_scaling": "signed",
    "lam": 0.5,
    "jobs": 1,
    "judge_endpoint": None,
    "judge_token": None,
    "judge_timeout": 10.0,
    "judge_retries": 2,
    "cache_dir": None,
}


def load_config_file(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise SchemaViolation("", f"bad config file: {exc}") from exc


def resolve(key: str, flag_value=None, file_config: dict | None = None, cast=None):
    """Resolve one setting through the precedence chain."""
    env_var = ENV_VARS.get(key)
    if env_var and os.environ.get(env_var):
        value = os.environ[env_var]
    elif flag_value is not None:
        value = flag_value
    elif file_config and key in file_config:
        value = file_config[key]
    else:
        value = DEFAULTS.get(key)
    if value is not None and cast is not None:
        value = cast(value)
    return value
