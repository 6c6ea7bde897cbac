from __future__ import annotations

import fakeredis
import numpy as np
import pytest

from geoprop.core.errors import ConfigError, RepositoryError
from geoprop.quadrature import MultiplierTableBuilder, multiplier_table, table_key
from geoprop.repositories import MultiplierCache
from geoprop.repositories.multipliers import KEY_PREFIX


@pytest.fixture
def table(circle, circle_cutoff):
    return multiplier_table(circle, circle_cutoff, 0.1, 4.0)


def test_local_cache_roundtrip(table):
    cache = MultiplierCache()

    assert cache.get("k") is None
    cache.put("k", table)

    assert cache.get("k") is table
    assert len(cache) == 1


def test_redis_cache_stores_json_with_ttl(fake_redis, table):
    cache = MultiplierCache(fake_redis, ttl=60)

    cache.put("k", table)
    name = MultiplierCache.digest("k")
    restored = cache.get("k")

    assert name.startswith(KEY_PREFIX)
    assert 0 < fake_redis.ttl(name) <= 60
    assert restored is not None
    assert restored.manifold == table.manifold
    assert np.array_equal(restored.values, table.values)
    assert len(cache) == 1


def test_corrupt_redis_entry_is_a_miss(fake_redis):
    cache = MultiplierCache(fake_redis)
    fake_redis.set(MultiplierCache.digest("k"), '{"manifold": "circle:1"}')

    assert cache.get("k") is None


def test_builder_shares_tables_through_redis(fake_redis, circle, circle_cutoff):
    first = MultiplierTableBuilder(store=MultiplierCache(fake_redis))
    second = MultiplierTableBuilder(store=MultiplierCache(fake_redis))

    built = first.build(circle, circle_cutoff, 0.2, 1.0)
    key = table_key(circle, circle_cutoff, 0.2, 1.0, first.budget, first.tolerance)

    assert fake_redis.exists(MultiplierCache.digest(key))
    assert np.array_equal(second.build(circle, circle_cutoff, 0.2, 1.0).values, built.values)


def test_unreachable_redis_raises_repository_error(table):
    server = fakeredis.FakeServer()
    server.connected = False
    cache = MultiplierCache(fakeredis.FakeRedis(server=server, decode_responses=True))

    with pytest.raises(RepositoryError) as read_error:
        cache.get("k")
    with pytest.raises(RepositoryError) as write_error:
        cache.put("k", table)

    assert read_error.value.code == "cache.read"
    assert write_error.value.code == "cache.write"
    assert write_error.value.exit_code == 4


def test_local_cache_evicts_least_recently_used(table):
    cache = MultiplierCache(max_entries=2)
    cache.put("a", table)
    cache.put("b", table)

    assert cache.get("a") is table
    cache.put("c", table)

    assert len(cache) == 2
    assert cache.get("b") is None
    assert cache.get("a") is table
    assert cache.get("c") is table


def test_redis_cache_ignores_local_bound(fake_redis, table):
    cache = MultiplierCache(fake_redis, max_entries=1)

    cache.put("a", table)
    cache.put("b", table)

    assert len(cache) == 2
    assert cache.get("a") is not None


def test_cache_bound_must_be_positive():
    with pytest.raises(ConfigError) as excinfo:
        MultiplierCache(max_entries=0)

    assert excinfo.value.field == "cache_max_entries"
