"""Content-addressed on-disk cache for rank and kernel-dimension results.

Caching is off unless a directory is configured, either explicitly or through
the ``MSH_CACHE_DIR`` environment variable.  The tool version is part of every
key hash, so entries written by another version are never read.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__

ENV_VAR = "MSH_CACHE_DIR"


@dataclass(frozen=True)
class CacheKey:
    n: int
    p: int
    t: int
    k: int
    dual: bool = False
    kind: str = "rank"  # "rank" | "kernel_dim"

    def digest(self, version: str) -> str:
        payload = json.dumps({"key": asdict(self), "version": version}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()


class DiskCache:
    def __init__(self, directory: str | os.PathLike, version: str = __version__):
        self.directory = Path(directory)
        self.version = version
        self.enabled = True
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            probe = tempfile.NamedTemporaryFile(dir=self.directory, delete=True)
            probe.close()
        except OSError as exc:
            warnings.warn(f"cache directory {self.directory} is not writable ({exc}); caching disabled")
            self.enabled = False

    def _path(self, key: CacheKey) -> Path:
        return self.directory / f"{key.digest(self.version)}.json"

    def get(self, key: CacheKey):
        if not self.enabled:
            return None
        try:
            with open(self._path(key)) as fh:
                return json.load(fh)["value"]
        except (OSError, ValueError, KeyError):
            return None

    def put(self, key: CacheKey, value) -> None:
        if not self.enabled:
            return
        path = self._path(key)
        try:
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                json.dump({"key": asdict(key), "version": self.version, "value": value}, fh)
            os.replace(tmp, path)
        except OSError as exc:
            warnings.warn(f"cache write failed ({exc}); caching disabled")
            self.enabled = False


_active: DiskCache | None = None
_configured = False


def configure(directory: str | os.PathLike | None, version: str = __version__) -> DiskCache | None:
    """Install the process-wide cache; ``None`` turns caching off."""
    global _active, _configured
    _active = DiskCache(directory, version) if directory else None
    _configured = True
    return _active


def active() -> DiskCache | None:
    global _active, _configured
    if not _configured:
        _configured = True
        env = os.environ.get(ENV_VAR)
        _active = DiskCache(env) if env else None
    return _active


def cache_get(key: CacheKey):
    cache = active()
    return None if cache is None else cache.get(key)


def cache_put(key: CacheKey, value) -> None:
    cache = active()
    if cache is not None:
        cache.put(key, value)
