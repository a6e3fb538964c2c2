import numpy as np

from app.config.config_model import CacheModel
from app.core.cache_manager import MemoCache, configure_cache, get_cache


def test_keys_quantize_coordinates():
    cache = MemoCache(CacheModel(quantum=1e-6))
    first = cache.generate_cache_key("f", np.array([0.1, 0.2]), category="transform")
    assert first == cache.generate_cache_key("f", np.array([0.1 + 1e-9, 0.2]), category="transform")
    assert first != cache.generate_cache_key("f", np.array([0.1, 0.3]), category="transform")
    assert first != cache.generate_cache_key("f", np.array([0.1, 0.2]), category="samples")


def test_negative_zero_shares_key():
    cache = MemoCache()
    assert cache.generate_cache_key(np.array([-0.0])) == cache.generate_cache_key(np.array([0.0]))


def test_far_coordinates_keep_distinct_keys():
    cache = MemoCache(CacheModel(quantum=1e-9))
    far = cache.generate_cache_key(np.array([1e10, 0.0]))
    assert far == cache.generate_cache_key(np.array([1e10, -0.0]))
    assert far != cache.generate_cache_key(np.array([2e10, 0.0]))
    assert far != cache.generate_cache_key(np.array([-1e10, 0.0]))
    assert cache.generate_cache_key(np.array([np.inf])) != cache.generate_cache_key(np.array([-np.inf]))


def test_lru_eviction_and_statistics():
    cache = MemoCache(CacheModel(max_size=2))
    cache.set("a", 1)
    cache.set("b", 2)
    assert cache.get("a") == 1
    cache.set("c", 3)
    assert cache.get("b") is None
    assert cache.get("a") == 1 and cache.get("c") == 3
    stats = cache.get_statistics()
    assert stats['evictions'] == 1
    assert stats['hits'] == 3 and stats['misses'] == 1
    assert stats['total_entries'] == 2


def test_disabled_cache_always_computes():
    cache = MemoCache(CacheModel(enabled=False))
    calls = []
    assert cache.get_or_compute("k", lambda: calls.append(1) or 5) == 5
    assert cache.get_or_compute("k", lambda: calls.append(1) or 5) == 5
    assert len(calls) == 2
    assert cache.set("k", 1) is False


def test_lookup_rows_computes_only_missing_points():
    cache = MemoCache()
    seen = []

    def compute(points):
        seen.append(len(points))
        return points.sum(axis=1, keepdims=True)

    first = cache.lookup_rows("transform", "tok", np.array([[1.0, 2.0], [3.0, 4.0]]), compute)
    second = cache.lookup_rows("transform", "tok", np.array([[3.0, 4.0], [5.0, 6.0], [1.0, 2.0]]), compute)
    np.testing.assert_allclose(first[:, 0], [3.0, 7.0])
    np.testing.assert_allclose(second[:, 0], [7.0, 11.0, 3.0])
    assert seen == [2, 1]


def test_clear_by_category():
    cache = MemoCache()
    cache.set("x", np.zeros(8), category="samples")
    cache.set("y", 1, category="transform")
    cache.clear_cache("samples")
    assert cache.get("x") is None and cache.get("y") == 1
    assert cache.get_statistics()['categories']['samples']['entries'] == 0
    cache.clear_cache()
    assert cache.get_statistics()['total_entries'] == 0


def test_configure_replaces_shared_cache():
    replaced = configure_cache(CacheModel(max_size=7))
    assert get_cache() is replaced
    assert replaced.max_cache_size == 7
