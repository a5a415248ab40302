"""On-disk JSON cache for exact S-matrices and Macdonald tables.

Entries carry a version stamp; a missing, corrupt or stale entry is
recomputed and overwritten.  Exact scalars are stored as rational vectors,
so a roundtrip reproduces them exactly.
"""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any, Callable

__all__ = ["CACHE_VERSION", "ENV_VAR", "CacheError", "ResultCache", "resolve_cache_dir", "dumps"]

CACHE_VERSION = 1
ENV_VAR = "TORUSBLOCKS_CACHE"

log = logging.getLogger(__name__)


class CacheError(RuntimeError):
    """A cache entry could not be decoded."""


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def resolve_cache_dir(flag: str | None) -> Path | None:
    """Flag value if given, else the environment variable, else no cache."""
    value = flag or os.environ.get(ENV_VAR)
    return Path(value) if value else None


class ResultCache:
    """Directory of JSON files keyed by name.

    Parameters
    ----------
    root : Path or None
        Cache directory; ``None`` disables caching (every lookup recomputes).
    """

    def __init__(self, root: Path | None):
        self.root = Path(root) if root is not None else None
        self.events: list[tuple[str, str]] = []

    def path(self, key: str) -> Path:
        if self.root is None:
            raise CacheError("cache is disabled")
        return self.root / f"{key}.json"

    def load(self, key: str, decode: Callable[[Any], Any]):
        """Decoded entry, or raise CacheError / FileNotFoundError."""
        raw = self.path(key).read_text()
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CacheError(f"corrupt cache entry {key}") from exc
        if not isinstance(doc, dict) or doc.get("version") != CACHE_VERSION or doc.get("key") != key:
            raise CacheError(f"stale cache entry {key}")
        try:
            return decode(doc["data"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CacheError(f"undecodable cache entry {key}") from exc

    def store(self, key: str, payload: Any):
        if self.root is None:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = self.path(key).with_suffix(".tmp")
        tmp.write_text(dumps({"version": CACHE_VERSION, "key": key, "data": payload}))
        tmp.replace(self.path(key))

    def get_or_compute(self, key: str, compute: Callable[[], Any], encode: Callable[[Any], Any],
                       decode: Callable[[Any], Any]):
        """Cached value for key, recomputing on a miss, a corrupt entry or a version mismatch."""
        if self.root is not None:
            try:
                value = self.load(key, decode)
                self.events.append((key, "hit"))
                return value
            except FileNotFoundError:
                self.events.append((key, "miss"))
            except CacheError as exc:
                log.warning("%s; recomputing", exc)
                self.events.append((key, "recompute"))
        value = compute()
        self.store(key, encode(value))
        return value

    def clear(self) -> int:
        if self.root is None or not self.root.exists():
            return 0
        n = 0
        for f in self.root.glob("*.json"):
            f.unlink()
            n += 1
        return n

    def keys(self) -> list[str]:
        if self.root is None or not self.root.exists():
            return []
        return sorted(f.stem for f in self.root.glob("*.json"))
