"""Thin HTTP client speaking the gateway check/decision API verbatim."""

from __future__ import annotations

from typing import Any

import httpx


class GatewayUnreachable(RuntimeError):
    pass


class GatewayClient:
    def __init__(self, base_url: str, timeout: float = 10.0) -> None:
        self._client = httpx.Client(base_url=base_url, timeout=timeout)

    def check(
        self,
        agent_id: str,
        tool_name: str,
        arguments: Any,
        session_id: str | None = None,
    ) -> dict:
        body: dict[str, Any] = {
            "agent_id": agent_id,
            "tool_name": tool_name,
            "arguments": arguments,
        }
        if session_id is not None:
            body["session_id"] = session_id
        try:
            response = self._client.post("/api/v1/check", json=body)
        except httpx.HTTPError as exc:
            raise GatewayUnreachable(str(exc)) from exc
        if response.status_code == 429:
            return {"decision": "rate_limited"}
        if response.status_code != 200:
            raise GatewayUnreachable(f"check returned HTTP {response.status_code}")
        return response.json()

    def poll_decision(self, trace_id: str) -> str:
        try:
            response = self._client.get(f"/api/v1/decision/{trace_id}")
        except httpx.HTTPError as exc:
            raise GatewayUnreachable(str(exc)) from exc
        if response.status_code == 404:
            return "unknown"
        if response.status_code != 200:
            raise GatewayUnreachable(f"poll returned HTTP {response.status_code}")
        return response.json().get("decision", "unknown")

    def close(self) -> None:
        self._client.close()
