"""The suspend-and-decide core: one call in, proceed or denied out."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Any

from .client import GatewayClient, GatewayUnreachable
from .config import InterceptorConfig


@dataclass(frozen=True)
class GateResult:
    proceed: bool
    reason: str
    decision: str | None = None
    response: dict | None = None


def _denial_reason(response: dict) -> str:
    details = [s.get("detail", s.get("pattern", "")) for s in response.get("risk_signals", [])]
    violations = [v.get("policy_id", "") for v in response.get("violations", [])]
    parts = [d for d in details if d]
    if violations:
        parts.append("policy violations: " + ", ".join(violations))
    return "; ".join(parts) or "denied by gateway"


def check_and_gate(
    tool_name: str,
    arguments: Any,
    *,
    config: InterceptorConfig | None = None,
    client: GatewayClient | None = None,
    session_id: str | None = None,
    sleep=time.sleep,
) -> GateResult:
    """Consult the gateway and suspend until the call's fate is known.

    allow -> proceed. block -> denied with the risk detail. pending ->
    poll at the configured interval until a terminal decision or the
    timeout, which denies (fail closed). Transport failures follow
    fail_mode: "closed" denies, "open" proceeds.
    """
    config = config or InterceptorConfig()
    own_client = client is None
    if client is None:
        client = GatewayClient(config.gateway_url)
    try:
        try:
            response = client.check(config.agent_id, tool_name, arguments, session_id)
        except GatewayUnreachable as exc:
            if config.fail_mode == "open":
                return GateResult(True, f"gateway unreachable, fail-open: {exc}")
            return GateResult(False, f"gateway unreachable, failing closed: {exc}")

        decision = response.get("decision")
        if decision == "allow":
            return GateResult(True, "allowed", decision, response)
        if decision == "block":
            return GateResult(False, _denial_reason(response), decision, response)
        if decision == "rate_limited":
            if config.fail_mode == "open":
                return GateResult(True, "rate limited, fail-open", decision, response)
            return GateResult(False, "rate limited by gateway", decision, response)
        if decision != "pending":
            return GateResult(False, f"unexpected decision {decision!r}", decision, response)

        trace_id = response["trace_id"]
        deadline = time.monotonic() + config.poll_timeout
        while time.monotonic() < deadline:
            sleep(config.poll_interval)
            try:
                polled = client.poll_decision(trace_id)
            except GatewayUnreachable as exc:
                if config.fail_mode == "open":
                    return GateResult(True, f"gateway lost mid-poll, fail-open: {exc}")
                return GateResult(False, f"gateway lost mid-poll, failing closed: {exc}")
            if polled == "allow":
                return GateResult(True, "approved by reviewer", "allow", response)
            if polled in ("block", "unknown"):
                return GateResult(False, "blocked by reviewer" if polled == "block" else
                                  "review entry lost, failing closed", "block", response)
        return GateResult(False, "review timed out, failing closed", "block", response)
    finally:
        if own_client:
            client.close()
