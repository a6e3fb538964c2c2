"""
Cache Manager Module

In-memory memoization for the numerical layers: per-field samples on
quadrature grids and transform values at output points. Keys hash a category,
a field token and coordinates quantized to the configured step, so points that
agree up to rounding noise share an entry.

Values are deterministic functions of their keys, so concurrent writers that
race on the same key store identical values and the last writer wins.
"""

import hashlib
import json
import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable, Dict, Optional

import numpy as np

from app.config.config_model import CacheModel

_MAX_STEPS = 2.0 ** 62


@dataclass
class CacheEntry:
    """Cache entry data structure."""
    key: str
    value: Any
    category: str = "general"
    size_bytes: int = 0
    access_count: int = 0
    timestamp: datetime = field(default_factory=datetime.now)

    def update_access(self):
        self.access_count += 1


class MemoCache:
    """
    Thread-safe LRU cache with per-category statistics.

    Categories in use:
    - samples: field values on a whole grid
    - transform: transform values at single output points
    - nested: inner integrals of nested evaluations
    """

    def __init__(self, config: Optional[CacheModel] = None):
        """
        Initialize the cache from its configuration section.

        Args:
            config: CacheModel with enabled flag, capacity and key quantum
        """
        self.config = config or CacheModel()
        self.enabled = self.config.enabled
        self.max_cache_size = self.config.max_size
        self.quantum = self.config.quantum
        self.logger = logging.getLogger(__name__)

        self._memory_cache: "OrderedDict[str, CacheEntry]" = OrderedDict()
        self._stats = {
            'hits': 0,
            'misses': 0,
            'evictions': 0,
            'size_bytes': 0,
            'created': datetime.now(),
            'categories': {},
        }
        self._lock = threading.RLock()

    # ---- keys --------------------------------------------------------------------

    def _quantize(self, value: np.ndarray) -> str:
        scaled = np.asarray(value, dtype=float) / self.quantum
        if not np.all(np.abs(scaled) < _MAX_STEPS):
            # beyond the int64 range the exact float bytes are the key
            return "raw:" + (np.asarray(value, dtype=float) + 0.0).tobytes().hex()
        steps = np.round(scaled).astype(np.int64)
        # -0 and 0 quantize to the same key
        steps = steps + 0
        return steps.tobytes().hex()

    def generate_cache_key(self, *args, category: str = "general", **kwargs) -> str:
        """
        Generate a cache key from arguments.

        Arrays are quantized to the configured step before hashing; other
        values enter through their string or JSON form.

        Args:
            *args: Positional arguments to include in key
            category: Cache category for key prefix
            **kwargs: Keyword arguments to include in key

        Returns:
            str: Generated cache key
        """
        key_parts = [f"cat:{category}"]
        for arg in args:
            if isinstance(arg, np.ndarray):
                key_parts.append(f"arr{arg.shape}:{self._quantize(arg)}")
            elif isinstance(arg, (dict, list)):
                key_parts.append(json.dumps(arg, sort_keys=True, default=str))
            else:
                key_parts.append(str(arg))
        for key, value in sorted(kwargs.items()):
            if isinstance(value, np.ndarray):
                key_parts.append(f"{key}:{self._quantize(value)}")
            else:
                key_parts.append(f"{key}:{value}")
        key_string = "|".join(key_parts)
        return hashlib.sha256(key_string.encode('utf-8')).hexdigest()

    # ---- get / set ---------------------------------------------------------------

    def get(self, key: str, default: Any = None) -> Any:
        """Cached value or default; a hit refreshes the LRU position."""
        with self._lock:
            entry = self._memory_cache.get(key)
            if entry is None:
                self._stats['misses'] += 1
                return default
            entry.update_access()
            self._memory_cache.move_to_end(key)
            self._stats['hits'] += 1
            self._update_category_stats(entry.category, 'hits')
            return entry.value

    def set(self, key: str, value: Any, category: str = "general") -> bool:
        """Store a value, evicting least recently used entries when full."""
        if not self.enabled:
            return False
        size_bytes = int(getattr(value, 'nbytes', 0))
        with self._lock:
            if key in self._memory_cache:
                self._remove_entry(key)
            self._ensure_cache_capacity()
            self._memory_cache[key] = CacheEntry(key=key, value=value, category=category, size_bytes=size_bytes)
            self._stats['size_bytes'] += size_bytes
            self._update_category_stats(category, 'entries', 1)
            self._update_category_stats(category, 'size_bytes', size_bytes)
        return True

    def get_or_compute(self, key: str, compute: Callable[[], Any], category: str = "general") -> Any:
        if not self.enabled:
            return compute()
        sentinel = object()
        value = self.get(key, sentinel)
        if value is sentinel:
            value = compute()
            self.set(key, value, category)
        return value

    def lookup_rows(self, category: str, token: str, points: np.ndarray,
                    compute: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """
        Row-wise memoization of a vectorized function of points.

        Args:
            category: Cache category
            token: Identity of the function (field token, sign, grid)
            points: (N, d) evaluation points
            compute: Maps (M, d) missing points to (M, ...) values

        Returns:
            (N, ...) values in the order of points
        """
        points = np.asarray(points, dtype=float)
        if not self.enabled:
            return compute(points)
        keys = [self.generate_cache_key(token, row, category=category) for row in points]
        sentinel = object()
        found = [self.get(key, sentinel) for key in keys]
        missing = [i for i, value in enumerate(found) if value is sentinel]
        if missing:
            fresh = compute(points[missing])
            for position, i in enumerate(missing):
                found[i] = fresh[position]
                self.set(keys[i], fresh[position], category)
        return np.stack(found) if found else compute(points)

    # ---- maintenance -------------------------------------------------------------

    def _ensure_cache_capacity(self):
        """Ensure cache doesn't exceed maximum capacity."""
        while len(self._memory_cache) >= self.max_cache_size:
            _, entry = self._memory_cache.popitem(last=False)
            self._stats['size_bytes'] -= entry.size_bytes
            self._stats['evictions'] += 1
            self._update_category_stats(entry.category, 'entries', -1)
            self._update_category_stats(entry.category, 'size_bytes', -entry.size_bytes)

    def _remove_entry(self, key: str):
        entry = self._memory_cache.pop(key, None)
        if entry is not None:
            self._stats['size_bytes'] -= entry.size_bytes
            self._update_category_stats(entry.category, 'entries', -1)
            self._update_category_stats(entry.category, 'size_bytes', -entry.size_bytes)

    def _update_category_stats(self, category: str, stat: str, value: int = 1):
        stats = self._stats['categories'].setdefault(category, {'hits': 0, 'entries': 0, 'size_bytes': 0})
        stats[stat] += value

    def clear_cache(self, category: Optional[str] = None):
        """
        Clear cache entries.

        Args:
            category: If specified, only clear entries from this category
        """
        with self._lock:
            if category:
                keys_to_remove = [key for key, entry in self._memory_cache.items() if entry.category == category]
                for key in keys_to_remove:
                    self._remove_entry(key)
                self.logger.debug(f"Cleared {len(keys_to_remove)} entries from category: {category}")
            else:
                self._memory_cache.clear()
                self._stats['size_bytes'] = 0
                self._stats['categories'] = {}
                self.logger.debug("Cleared all cache entries")

    def get_statistics(self) -> Dict[str, Any]:
        """
        Get cache statistics.

        Returns:
            Dict with entry counts, hit rate, evictions and per-category figures
        """
        with self._lock:
            total_requests = self._stats['hits'] + self._stats['misses']
            hit_rate = (self._stats['hits'] / total_requests * 100) if total_requests > 0 else 0
            return {
                'total_entries': len(self._memory_cache),
                'max_entries': self.max_cache_size,
                'size_mb': round(self._stats['size_bytes'] / (1024 * 1024), 2),
                'hits': self._stats['hits'],
                'misses': self._stats['misses'],
                'hit_rate_percent': round(hit_rate, 2),
                'evictions': self._stats['evictions'],
                'categories': {k: dict(v) for k, v in self._stats['categories'].items()},
                'uptime_seconds': (datetime.now() - self._stats['created']).total_seconds(),
            }


_shared_cache: Optional[MemoCache] = None
_shared_lock = threading.Lock()


def get_cache() -> MemoCache:
    """Process-wide cache, created with default settings on first use."""
    global _shared_cache
    with _shared_lock:
        if _shared_cache is None:
            _shared_cache = MemoCache()
        return _shared_cache


def configure_cache(config: CacheModel) -> MemoCache:
    """Replace the process-wide cache with one built from `config`."""
    global _shared_cache
    with _shared_lock:
        _shared_cache = MemoCache(config)
        return _shared_cache
