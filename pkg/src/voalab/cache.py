"""Persistent store for n-th products between normal monomials.

One JSON file holds the entries of several presentations, keyed by their
fingerprints.  A file with the wrong version, a bad checksum, or anything
that fails to parse is ignored as a whole, never partially trusted.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path

from .scalars import format_ratfunc, parse_ratfunc
from .vertex_core import AlgebraPresentation

__all__ = ["CACHE_VERSION", "ProductCache", "default_cache_path"]

CACHE_VERSION = 1
ENV_VAR = "VOALAB_CACHE"

log = logging.getLogger(__name__)


def default_cache_path() -> Path | None:
    p = os.environ.get(ENV_VAR)
    return Path(p) if p else None


def _enc_mono(m) -> list:
    return [[g, d] for g, d in m]


def _dec_mono(x) -> tuple:
    return tuple((int(g), int(d)) for g, d in x)


def _checksum(body) -> str:
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


class ProductCache:
    def __init__(self, path: str | os.PathLike | None):
        self.path = Path(path) if path else None
        self.sections: dict[str, list] = {}
        self.status = "absent"
        if self.path and self.path.exists():
            self._read()

    def _read(self) -> None:
        try:
            doc = json.loads(self.path.read_text())
            if doc.get("version") != CACHE_VERSION:
                self.status = "version mismatch"
                return
            body = doc["sections"]
            if doc.get("checksum") != _checksum(body):
                self.status = "checksum mismatch"
                return
            if not isinstance(body, dict):
                raise ValueError("sections must be an object")
            self.sections = body
            self.status = "loaded"
        except (OSError, ValueError, KeyError, TypeError, AttributeError) as exc:
            self.status = f"corrupt ({type(exc).__name__})"
            self.sections = {}
        if self.status != "loaded":
            log.warning("ignoring cache %s: %s", self.path, self.status)

    def warm(self, alg: AlgebraPresentation) -> int:
        """Seed the engine of ``alg`` with stored products; returns the number loaded."""
        entries = self.sections.get(alg.fingerprint(), [])
        eng = alg.engine
        loaded = {}
        try:
            for a, b, n, terms in entries:
                key = (_dec_mono(a), _dec_mono(b), int(n))
                loaded[key] = {_dec_mono(m): parse_ratfunc(c) for m, c in terms}
        except Exception as exc:  # any malformed entry voids the section
            log.warning("ignoring cache section for %s: %s", alg.name, exc)
            return 0
        for k, v in loaded.items():
            eng._store(eng._prod, k, v)
        return len(loaded)

    def absorb(self, alg: AlgebraPresentation) -> int:
        eng = alg.engine
        rows = []
        for (a, b, n), lin in sorted(eng._prod.items(), key=lambda t: repr(t[0])):
            rows.append([_enc_mono(a), _enc_mono(b), n, [[_enc_mono(m), format_ratfunc(c)] for m, c in lin.items()]])
        self.sections[alg.fingerprint()] = rows
        return len(rows)

    def save(self) -> None:
        if not self.path:
            return
        doc = {"version": CACHE_VERSION, "checksum": _checksum(self.sections), "sections": self.sections}
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        tmp.write_text(json.dumps(doc))
        tmp.replace(self.path)
