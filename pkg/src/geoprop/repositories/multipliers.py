"""Cache of multiplier tables keyed by manifold, cutoff, time and quadrature settings."""

from __future__ import annotations

import hashlib
import logging
import threading
from collections import OrderedDict
from typing import Optional

from pydantic import ValidationError
from redis import Redis
from redis.exceptions import RedisError

from geoprop.core.errors import ConfigError, RepositoryError
from geoprop.quadrature import MultiplierTable
from geoprop.schemas import MultiplierTablePayload

logger = logging.getLogger(__name__)

KEY_PREFIX = "multipliers:"


class MultiplierCache:
    """Redis-backed when a client is given, otherwise a bounded in-process LRU.

    The local dictionary keeps at most ``max_entries`` tables and is guarded by
    a lock; Redis calls run outside it.
    """

    def __init__(
        self, client: Optional[Redis] = None, ttl: int = 86400, max_entries: int = 256
    ) -> None:
        if max_entries <= 0:
            raise ConfigError(
                field="cache_max_entries",
                message="must be positive",
                details={"value": max_entries},
            )
        self._client = client
        self._ttl = ttl
        self._max_entries = max_entries
        self._local: OrderedDict[str, MultiplierTable] = OrderedDict()
        self._lock = threading.Lock()

    @staticmethod
    def digest(key: str) -> str:
        return KEY_PREFIX + hashlib.sha1(key.encode("utf-8")).hexdigest()

    def get(self, key: str) -> MultiplierTable | None:
        name = self.digest(key)
        if self._client is None:
            with self._lock:
                table = self._local.get(name)
                if table is not None:
                    self._local.move_to_end(name)
                return table

        try:
            raw = self._client.get(name)
        except RedisError as exc:
            raise RepositoryError(
                code="cache.read",
                message="Failed to read multiplier table from the cache.",
                details={"key": name, "error": str(exc)},
            ) from exc
        if raw is None:
            return None

        try:
            payload = MultiplierTablePayload.model_validate_json(raw)
        except ValidationError:
            logger.warning("multiplier_cache_corrupt", extra={"key": name})
            return None
        logger.debug("multiplier_cache_hit", extra={"key": name})
        return MultiplierTable.from_dict(payload.model_dump())

    def put(self, key: str, table: MultiplierTable) -> None:
        name = self.digest(key)
        if self._client is None:
            with self._lock:
                self._local[name] = table
                self._local.move_to_end(name)
                while len(self._local) > self._max_entries:
                    evicted, _ = self._local.popitem(last=False)
                    logger.debug("multiplier_cache_evicted", extra={"key": evicted})
            return

        body = MultiplierTablePayload.model_validate(table.to_dict()).model_dump_json()
        try:
            self._client.set(name, body, ex=self._ttl)
        except RedisError as exc:
            raise RepositoryError(
                code="cache.write",
                message="Failed to store multiplier table in the cache.",
                details={"key": name, "error": str(exc)},
            ) from exc

    def __len__(self) -> int:
        if self._client is None:
            return len(self._local)
        return sum(1 for _ in self._client.scan_iter(match=KEY_PREFIX + "*"))


__all__ = ["MultiplierCache"]
