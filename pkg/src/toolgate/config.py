"""Gateway configuration: one JSON file plus environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

ENV_PREFIX = "TOOLGATE_"
MAX_BODY_BYTES_DEFAULT = 1 << 20  # 1 MiB


def builtin_policy_dir() -> Path:
    return Path(str(resources.files("toolgate").joinpath("data/policies")))


@dataclass
class GatewayConfig:
    host: str = "127.0.0.1"
    port: int = 8400
    policy_dir: str | None = None       # None -> packaged defaults
    registry_path: str | None = None    # None -> packaged registry
    store_path: str = "toolgate.db"
    rate_limit: int = 100
    rate_window_s: float = 60.0
    revoke_threshold: int = 5
    revoke_window_s: float = 600.0
    approval_timeout_s: float = 300.0
    internal_hosts: list[str] = field(default_factory=list)
    tool_overrides: dict[str, str] = field(default_factory=dict)
    max_body_bytes: int = MAX_BODY_BYTES_DEFAULT
    auto_register_agents: bool = True

    def resolved_policy_dir(self) -> Path:
        return Path(self.policy_dir) if self.policy_dir else builtin_policy_dir()


_ENV_FIELDS = {
    "host": str,
    "port": int,
    "policy_dir": str,
    "registry_path": str,
    "store_path": str,
    "rate_limit": int,
    "rate_window_s": float,
    "revoke_threshold": int,
    "revoke_window_s": float,
    "approval_timeout_s": float,
    "max_body_bytes": int,
}


def load_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> GatewayConfig:
    """Build a config from defaults, then the file, then TOOLGATE_* env vars."""
    values: dict = {}
    if path is not None:
        doc = json.loads(Path(path).read_text())
        known = {f.name for f in fields(GatewayConfig)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(doc)

    env = env if env is not None else dict(os.environ)
    for name, cast in _ENV_FIELDS.items():
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = cast(raw)
    return GatewayConfig(**values)
