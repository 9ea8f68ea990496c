"""Interceptor configuration, environment-driven by default."""

from __future__ import annotations

import os
from dataclasses import dataclass, field


def _env(name: str, default: str) -> str:
    return os.environ.get(name, default)


@dataclass
class InterceptorConfig:
    gateway_url: str = field(default_factory=lambda: _env("TOOLGATE_URL", "http://127.0.0.1:8400"))
    agent_id: str = field(default_factory=lambda: _env("TOOLGATE_AGENT_ID", "sdk-agent"))
    poll_interval: float = field(default_factory=lambda: float(_env("TOOLGATE_POLL_INTERVAL", "2")))
    poll_timeout: float = field(default_factory=lambda: float(_env("TOOLGATE_POLL_TIMEOUT", "300")))
    fail_mode: str = field(default_factory=lambda: _env("TOOLGATE_FAIL_MODE", "closed"))

    def __post_init__(self) -> None:
        if self.poll_interval <= 0:
            raise ValueError("poll_interval must be positive")
        if self.poll_timeout < self.poll_interval:
            raise ValueError("poll_timeout must be at least poll_interval")
        if self.fail_mode not in ("closed", "open"):
            raise ValueError("fail_mode must be 'closed' or 'open'")
