"""Runtime limits.

Each limit resolves as: explicit override (set by CLI flags) > ``SHELFMIX_*``
environment variable > built-in default.
"""

from __future__ import annotations

import os

DEFAULT_MAX_N = 64
DEFAULT_ENUM_BUDGET = 10**7
DEFAULT_MAX_SHELVES = 10**15

_overrides: dict[str, int] = {}


def set_override(name: str, value: int | None) -> None:
    if value is None:
        _overrides.pop(name, None)
    else:
        _overrides[name] = value


def clear_overrides() -> None:
    _overrides.clear()


def _resolve(name: str, default: int) -> int:
    if name in _overrides:
        return _overrides[name]
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def max_n() -> int:
    return _resolve("SHELFMIX_MAX_N", DEFAULT_MAX_N)


def enum_budget() -> int:
    return _resolve("SHELFMIX_ENUM_BUDGET", DEFAULT_ENUM_BUDGET)


def max_shelves() -> int:
    return _resolve("SHELFMIX_MAX_SHELVES", DEFAULT_MAX_SHELVES)
