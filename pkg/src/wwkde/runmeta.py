"""Run manifests: canonical config hashing and output inventory.

Identical configurations hash identically, so a manifest pins exactly what
produced a set of output files; only the timestamps vary between reruns.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

__all__ = ["canonical_json", "config_hash", "RunManifest"]


def canonical_json(obj) -> str:
    """Stable serialization: sorted keys, no whitespace variation."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    config_hash: str
    tool_version: str
    base_seed: int | None = None
    started_at: str = field(default_factory=_now)
    finished_at: str | None = None
    outputs: list = field(default_factory=list)

    def add_output(self, path) -> None:
        self.outputs.append(str(path))

    def finish(self) -> None:
        self.finished_at = _now()

    def write(self, path) -> None:
        if self.finished_at is None:
            self.finish()
        payload = {
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "base_seed": self.base_seed,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "outputs": list(self.outputs),
        }
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
