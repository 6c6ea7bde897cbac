"""Redis client utilities for the multiplier-table cache."""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

from redis import Redis

from geoprop.core.config import LabSettings, get_settings


def create_cache_client(settings: LabSettings | None = None) -> Optional[Redis]:
    """Instantiate a Redis client when a cache URL is configured."""

    settings = settings or get_settings()
    if not settings.cache_url:
        return None
    return Redis.from_url(settings.cache_url, encoding="utf-8", decode_responses=True)


@lru_cache
def get_cache_client() -> Optional[Redis]:
    """Return cached Redis client instance (None without a cache URL)."""

    return create_cache_client()


__all__ = ["create_cache_client", "get_cache_client"]
