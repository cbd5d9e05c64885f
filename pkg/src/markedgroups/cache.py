"""On-disk cache of Cayley balls: <dir>/balls/<hash>/<radius>.json."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Callable

from markedgroups import __version__
from markedgroups.space import CayleyBall, canonical_certificate

FORMAT_VERSION = 1


def spec_hash(spec: str, mode: str = "auto") -> str:
    return hashlib.sha256(f"{spec}|{mode}".encode()).hexdigest()[:16]


class BallCache:
    def __init__(self, root: str | os.PathLike, verify: bool = False):
        self.root = Path(root)
        self.verify = verify
        self.hits = self.misses = self.repaired = 0

    def path(self, spec: str, radius: int, mode: str = "auto") -> Path:
        return self.root / "balls" / spec_hash(spec, mode) / f"{radius}.json"

    def _read(self, p: Path, spec: str, radius: int) -> CayleyBall | None:
        try:
            data = json.loads(p.read_text())
        except (OSError, ValueError):
            return None
        if (data.get("format") != FORMAT_VERSION or data.get("spec") != spec
                or data.get("radius") != radius):
            return None
        try:
            b = CayleyBall.from_json(data["ball"])
        except (KeyError, TypeError, ValueError):
            return None
        if canonical_certificate(b).hex() != data.get("certificate"):
            return None
        return b

    def _write(self, p: Path, spec: str, radius: int, b: CayleyBall) -> None:
        p.parent.mkdir(parents=True, exist_ok=True)
        entry = {
            "format": FORMAT_VERSION,
            "version": __version__,
            "spec": spec,
            "radius": radius,
            "certificate": canonical_certificate(b).hex(),
            "ball": b.to_json(),
        }
        # write-then-rename so a concurrent reader never sees half a file
        fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(entry, fh, sort_keys=True, separators=(",", ":"))
        os.replace(tmp, p)

    def get_or_compute(self, spec: str, radius: int, compute: Callable[[], CayleyBall],
                       mode: str = "auto") -> CayleyBall:
        p = self.path(spec, radius, mode)
        hit = self._read(p, spec, radius)
        if hit is not None and self.verify:
            fresh = compute()
            if canonical_certificate(fresh) != canonical_certificate(hit):
                self.repaired += 1
                self._write(p, spec, radius, fresh)
                return fresh
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        b = compute()
        self._write(p, spec, radius, b)
        return b
