"""
Runtime defaults read from the environment.

.env files are optional: readonly_sources_of_truth/.env is loaded first and
project/src/.env may override it. Command-line flags always win over both.
"""

import os
from typing import Optional

from dotenv import load_dotenv

from project.src.utils.path_utils import get_env_file_path, get_project_env_file_path


_TRUTHY = {"1", "true", "yes", "on"}


def load_all_env() -> None:
    """Loads the readonly .env, then the project .env on top of it."""
    for env_path, override in ((get_env_file_path(), False), (get_project_env_file_path(), True)):
        if os.path.exists(env_path):
            load_dotenv(env_path, override=override)


def get_env_var(key: str, default: Optional[str] = None) -> Optional[str]:
    """Stripped value of an environment variable; blank counts as unset."""
    value = os.getenv(key)
    if value is None or not value.strip():
        return default
    return value.strip()


def _get_int_var(key: str, default: int) -> int:
    raw = get_env_var(key)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"Environment variable '{key}' must be an integer, got: {raw!r}")


def get_default_seed() -> int:
    """
    Gets the default random seed (MINMAX_SEED, default 0).

    Returns:
        int: Seed used when the CLI receives no --seed flag
    """
    return _get_int_var("MINMAX_SEED", 0)


def get_default_threads() -> int:
    """Sweep worker threads (MINMAX_THREADS, default 1, never below 1)."""
    return max(1, _get_int_var("MINMAX_THREADS", 1))


def is_verbose() -> bool:
    return (get_env_var("MINMAX_VERBOSE") or "").lower() in _TRUTHY
