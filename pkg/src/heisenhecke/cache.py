"""On-disk cache of local structure constants.

One JSON file per product T(k1) T(k2), named by the SHA-256 of its lookup
key (system, p, k1, k2, engine version).  A record that fails to parse or
whose stored lookup key differs is deleted and recomputed.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

from . import __version__
from .core import CosetSystem

ENV_VAR = "HEISENHECKE_CACHE_DIR"

log = logging.getLogger(__name__)


def default_cache_dir() -> Path:
    if os.environ.get(ENV_VAR):
        return Path(os.environ[ENV_VAR])
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "heisenhecke"


class StructureCache:
    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def lookup(self, system: CosetSystem, k1, k2) -> dict:
        return {
            "system": system.tag,
            "p": system.p,
            "k1": system.key_to_json(k1),
            "k2": system.key_to_json(k2),
            "engine": __version__,
        }

    def path(self, lookup: dict) -> Path:
        digest = hashlib.sha256(json.dumps(lookup, sort_keys=True).encode()).hexdigest()
        return self.root / f"{digest}.json"

    def load(self, system: CosetSystem, k1, k2) -> dict | None:
        lookup = self.lookup(system, k1, k2)
        path = self.path(lookup)
        if not path.exists():
            self.misses += 1
            return None
        try:
            record = json.loads(path.read_text())
            if record["lookup"] != lookup:
                raise ValueError("lookup key mismatch")
            out = {}
            for term in record["payload"]:
                out[system.key_from_json(term["key"])] = int(term["coeff"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            log.warning("discarding corrupted cache record %s: %s", path.name, exc)
            path.unlink(missing_ok=True)
            self.misses += 1
            return None
        self.hits += 1
        return dict(sorted(out.items(), key=lambda kv: system.sort_key(kv[0])))

    def save(self, system: CosetSystem, k1, k2, result: dict) -> None:
        lookup = self.lookup(system, k1, k2)
        payload = [{"key": system.key_to_json(k), "coeff": c} for k, c in result.items()]
        data = json.dumps({"lookup": lookup, "payload": payload}, sort_keys=True)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, self.path(lookup))
