"""Application configuration: one JSON file naming the store directory,
optional lexicon/cue overrides, and the available backends.

Secrets never live in the file; HTTP backends name an environment variable
holding their API key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import DomainError
from .llm import (
    BackendConfig,
    HttpBackend,
    MockBackend,
    MockBehavior,
    ScriptedSource,
    ThrottleRegistry,
)


@dataclass
class AppConfig:
    store_path: Path
    backends: dict = field(default_factory=dict)  # backend_id -> backend object
    rate_limits: dict = field(default_factory=dict)  # backend_id -> requests/hour
    lexicon_path: Optional[Path] = None
    cues_path: Optional[Path] = None
    static_dir: Optional[Path] = None

    def build_throttles(self) -> ThrottleRegistry:
        registry = ThrottleRegistry()
        for backend_id, limit in self.rate_limits.items():
            registry.register(backend_id, limit)
        return registry


def _build_backend(entry: dict, base_dir: Path):
    kind = entry.get("type")
    backend_id = entry.get("backendId")
    if not backend_id:
        raise DomainError("backend entry missing backendId")
    if kind == "http":
        return HttpBackend(BackendConfig.from_json_dict(entry)), entry.get("rateLimit")
    if kind == "mock":
        behavior = MockBehavior.from_string(entry.get("behavior", "echo"))
        script = None
        if behavior is MockBehavior.SCRIPTED:
            script_path = entry.get("scriptPath")
            if not script_path:
                raise DomainError(f"backend {backend_id!r}: scripted mock needs scriptPath")
            script = ScriptedSource.from_file(base_dir / script_path)
        backend = MockBackend(behavior, script=script, backend_id=backend_id)
        return backend, entry.get("rateLimit")
    raise DomainError(f"backend {backend_id!r}: unknown type {kind!r}")


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from exc
    if "storePath" not in data:
        raise DomainError("config missing storePath")
    base = path.parent
    config = AppConfig(store_path=(base / data["storePath"]).resolve())
    for key, attr in (("lexiconPath", "lexicon_path"), ("cuesPath", "cues_path"),
                      ("staticDir", "static_dir")):
        if data.get(key):
            setattr(config, attr, (base / data[key]).resolve())
    for entry in data.get("backends", []):
        backend, rate_limit = _build_backend(entry, base)
        if backend.backend_id in config.backends:
            raise DomainError(f"duplicate backendId {backend.backend_id!r}")
        config.backends[backend.backend_id] = backend
        if rate_limit is not None:
            config.rate_limits[backend.backend_id] = rate_limit
    return config
