"""check_and_gate against a live gateway: decisions, polling, fail modes."""

from __future__ import annotations

import threading
import time

import httpx
import pytest

from toolgate_sdk import InterceptorConfig, check_and_gate


def config_for(gateway_url: str, **overrides) -> InterceptorConfig:
    values = dict(
        gateway_url=gateway_url,
        agent_id="sdk-gate-agent",
        poll_interval=0.1,
        poll_timeout=3.0,
        fail_mode="closed",
    )
    values.update(overrides)
    return InterceptorConfig(**values)


def test_allow_proceeds(gateway_url):
    result = check_and_gate(
        "web_search", {"query": "deployment status"}, config=config_for(gateway_url)
    )
    assert result.proceed
    assert result.decision == "allow"


def test_block_denies_with_detail(gateway_url):
    result = check_and_gate(
        "execute_sql",
        {"query": "SELECT 1; DROP TABLE audit_log; --"},
        config=config_for(gateway_url),
    )
    assert not result.proceed
    assert result.decision == "block"
    assert "Stacked query" in result.reason


def approve_when_pending(gateway_url: str, agent_id: str, decision: str, delay: float) -> threading.Thread:
    def worker() -> None:
        deadline = time.monotonic() + 5
        with httpx.Client(base_url=gateway_url, timeout=5.0) as client:
            while time.monotonic() < deadline:
                entries = client.get("/api/v1/reviews").json()["reviews"]
                mine = [e for e in entries if e["request"]["agent_id"] == agent_id]
                if mine:
                    time.sleep(delay)
                    client.post(
                        f"/api/v1/review/{mine[0]['trace_id']}",
                        json={"decision": decision, "reviewer": "tester"},
                    )
                    return
                time.sleep(0.05)

    thread = threading.Thread(target=worker)
    thread.start()
    return thread


PENDING_ARGS = {"command": "kubectl delete pod api-server-7b"}


def test_pending_then_approved_resumes_quickly(gateway_url):
    agent = "sdk-approve-agent"
    reviewer = approve_when_pending(gateway_url, agent, "allow", delay=0.3)
    started = time.monotonic()
    result = check_and_gate(
        "execute_shell", PENDING_ARGS, config=config_for(gateway_url, agent_id=agent)
    )
    elapsed = time.monotonic() - started
    reviewer.join()
    assert result.proceed
    assert result.decision == "allow"
    # Resolution lands ~0.3s in; the poll loop must pick it up within one cycle.
    assert elapsed < 2.5, elapsed


def test_pending_then_blocked_denies(gateway_url):
    agent = "sdk-block-agent"
    reviewer = approve_when_pending(gateway_url, agent, "block", delay=0.2)
    result = check_and_gate(
        "execute_shell", PENDING_ARGS, config=config_for(gateway_url, agent_id=agent)
    )
    reviewer.join()
    assert not result.proceed
    assert "reviewer" in result.reason


def test_pending_timeout_fails_closed(gateway_url):
    result = check_and_gate(
        "execute_shell",
        PENDING_ARGS,
        config=config_for(gateway_url, agent_id="sdk-timeout-agent", poll_timeout=0.5),
    )
    assert not result.proceed
    assert "timed out" in result.reason


def test_gateway_down_fail_closed():
    config = config_for("http://127.0.0.1:9")  # nothing listens on the discard port
    result = check_and_gate("web_search", {"query": "x"}, config=config)
    assert not result.proceed
    assert "failing closed" in result.reason


def test_gateway_down_fail_open():
    config = config_for("http://127.0.0.1:9", fail_mode="open")
    result = check_and_gate("web_search", {"query": "x"}, config=config)
    assert result.proceed


def test_config_validation():
    with pytest.raises(ValueError):
        InterceptorConfig(poll_interval=0)
    with pytest.raises(ValueError):
        InterceptorConfig(poll_interval=2, poll_timeout=1)
    with pytest.raises(ValueError):
        InterceptorConfig(fail_mode="maybe")


def test_config_reads_environment(monkeypatch):
    monkeypatch.setenv("TOOLGATE_URL", "http://gw.internal:9999")
    monkeypatch.setenv("TOOLGATE_AGENT_ID", "env-agent")
    monkeypatch.setenv("TOOLGATE_POLL_INTERVAL", "0.5")
    monkeypatch.setenv("TOOLGATE_FAIL_MODE", "open")
    config = InterceptorConfig()
    assert config.gateway_url == "http://gw.internal:9999"
    assert config.agent_id == "env-agent"
    assert config.poll_interval == 0.5
    assert config.fail_mode == "open"
