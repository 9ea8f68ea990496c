"""Config file loading and environment overrides."""

from __future__ import annotations

import json

import pytest

from toolgate.config import GatewayConfig, load_config


def test_defaults():
    config = load_config(env={})
    assert config.rate_limit == 100
    assert config.rate_window_s == 60.0
    assert config.revoke_threshold == 5
    assert config.approval_timeout_s == 300.0
    assert config.max_body_bytes == 1 << 20
    assert config.resolved_policy_dir().joinpath("sql-readonly.json").exists()


def test_file_values(tmp_path):
    path = tmp_path / "gateway.json"
    path.write_text(json.dumps({
        "port": 9001,
        "rate_limit": 10,
        "tool_overrides": {"legacy_tool": "database"},
        "internal_hosts": ["corp.example"],
    }))
    config = load_config(path, env={})
    assert config.port == 9001
    assert config.rate_limit == 10
    assert config.tool_overrides == {"legacy_tool": "database"}
    assert config.internal_hosts == ["corp.example"]


def test_env_overrides_file(tmp_path):
    path = tmp_path / "gateway.json"
    path.write_text(json.dumps({"port": 9001}))
    config = load_config(path, env={"TOOLGATE_PORT": "9002", "TOOLGATE_RATE_LIMIT": "7"})
    assert config.port == 9002
    assert config.rate_limit == 7


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "gateway.json"
    path.write_text(json.dumps({"prot": 9001}))
    with pytest.raises(ValueError, match="unknown config keys"):
        load_config(path, env={})


def test_config_used_by_gateway(tmp_path):
    from fastapi.testclient import TestClient

    from toolgate.gateway import create_app

    config = GatewayConfig(
        store_path=str(tmp_path / "a.db"),
        rate_limit=2,
        tool_overrides={"frobnicate": "database"},
    )
    app = create_app(config)
    with TestClient(app) as client:
        body = client.post(
            "/api/v1/check",
            json={"agent_id": "a", "tool_name": "frobnicate", "arguments": {}},
        ).json()
        assert body["category"] == "database"
        client.post("/api/v1/check", json={"agent_id": "a", "tool_name": "frobnicate", "arguments": {}})
        limited = client.post(
            "/api/v1/check", json={"agent_id": "a", "tool_name": "frobnicate", "arguments": {}}
        )
        assert limited.status_code == 429
