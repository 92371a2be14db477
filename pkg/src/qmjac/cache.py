"""Append-only JSON-lines store for point counts.

Each line is ``{"key": [g, a, p, r, modulus_id], "count": N}``. Lookups
return the most recent line for a key; unreadable lines are skipped with a
warning.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from pathlib import Path

log = logging.getLogger(__name__)

ENV_VAR = "QMJAC_CACHE"


def default_cache_path() -> Path | None:
    value = os.environ.get(ENV_VAR)
    return Path(value) if value else None


class CountCache:
    def __init__(self, path: str | os.PathLike | None):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._entries: dict[tuple, int] | None = None

    @staticmethod
    def make_key(g: int, a: str, p: int, r: int, modulus_id: str) -> tuple:
        return (int(g), str(a), int(p), int(r), str(modulus_id))

    def _load(self) -> dict[tuple, int]:
        if self._entries is not None:
            return self._entries
        entries: dict[tuple, int] = {}
        if self.path is not None and self.path.exists():
            with self.path.open("r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, 1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        obj = json.loads(line)
                        key = self.make_key(*obj["key"])
                        entries[key] = int(obj["count"])
                    except (ValueError, KeyError, TypeError) as exc:
                        log.warning("skipping corrupt cache line %d in %s: %s", lineno, self.path, exc)
        self._entries = entries
        return entries

    def get(self, key: tuple) -> int | None:
        with self._lock:
            return self._load().get(self.make_key(*key))

    def put(self, key: tuple, count: int) -> None:
        key = self.make_key(*key)
        with self._lock:
            entries = self._load()
            entries[key] = int(count)
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps({"key": list(key), "count": int(count)}) + "\n")


def cache_ops(cache: CountCache, op: str, key: tuple, value: int | None = None):
    """Dispatch helper for ``get``/``put`` used by the CLI."""
    if op == "get":
        return cache.get(key)
    if op == "put":
        if value is None:
            raise ValueError("put needs a value")
        cache.put(key, value)
        return value
    raise ValueError(f"unknown cache operation {op!r}")
