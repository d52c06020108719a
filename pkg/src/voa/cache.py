"""On-disk cache of command results, keyed by a hash of the canonical request."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from . import __version__


def cache_dir():
    return Path(os.environ.get("VOA_CACHE_DIR", "./.voa-cache"))


def request_key(request):
    blob = json.dumps({"version": __version__, "request": request}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


class Cache:
    def __init__(self, root=None, enabled=True):
        self.root = Path(root) if root is not None else cache_dir()
        self.enabled = enabled

    def _path(self, request):
        return self.root / f"{request_key(request)}.json"

    def get(self, request):
        if not self.enabled:
            return None
        p = self._path(request)
        try:
            with open(p, encoding="utf-8") as fh:
                entry = json.load(fh)
        except (OSError, ValueError):
            return None
        # a hash collision or a stale file should never be trusted
        if entry.get("request") != request:
            return None
        return entry.get("payload")

    def put(self, request, payload):
        if not self.enabled:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        data = json.dumps({"request": request, "payload": payload}, sort_keys=True)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(data)
            os.replace(tmp, self._path(request))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
