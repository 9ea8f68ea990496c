"""Response-path interception for chat clients that emit tool_use blocks.

The reference adapter targets the Anthropic messages surface
(``client.messages.create`` returning a response whose ``content`` holds
typed blocks), but the wrapper is shape-based: it works on any client
whose responses look like that, whether blocks are attribute objects or
plain dicts. Non-tool responses pass through untouched.

A blocked tool_use block is replaced with a text block the agent can
read, so the host application never sees the tool call at all and the
model can explain the denial to the user.
"""

from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable

from .client import GatewayClient
from .config import InterceptorConfig
from .gate import check_and_gate

_TOOL_USE = "tool_use"


def _get(block: Any, key: str, default: Any = None) -> Any:
    if isinstance(block, dict):
        return block.get(key, default)
    return getattr(block, key, default)


def _set(obj: Any, key: str, value: Any) -> None:
    if isinstance(obj, dict):
        obj[key] = value
    else:
        setattr(obj, key, value)


def _denial_block(tool_name: str, reason: str) -> dict:
    return {
        "type": "text",
        "text": (
            f"[Tool call '{tool_name}' was not executed: {reason}. "
            "Explain the denial to the user and do not retry the same call.]"
        ),
    }


def gate_response(response: Any, config: InterceptorConfig, client: GatewayClient | None = None) -> Any:
    """Check every tool_use block in a response; rewrite denied ones."""
    content = _get(response, "content")
    if not isinstance(content, list):
        return response
    if not any(_get(block, "type") == _TOOL_USE for block in content):
        return response

    new_content: list[Any] = []
    denied_any = False
    for block in content:
        if _get(block, "type") != _TOOL_USE:
            new_content.append(block)
            continue
        tool_name = _get(block, "name", "")
        arguments = _get(block, "input", {})
        result = check_and_gate(tool_name, arguments, config=config, client=client)
        if result.proceed:
            new_content.append(block)
        else:
            denied_any = True
            new_content.append(_denial_block(tool_name, result.reason))

    if not denied_any:
        return response
    _set(response, "content", new_content)
    if not any(_get(block, "type") == _TOOL_USE for block in new_content):
        if _get(response, "stop_reason") == _TOOL_USE:
            _set(response, "stop_reason", "end_turn")
    return response


@dataclass
class Activation:
    """Handle for an installed interceptor; ``restore()`` undoes the patch."""

    active: bool
    description: str
    _restore: Callable[[], None] = field(default=lambda: None, repr=False)

    def restore(self) -> None:
        if self.active:
            self._restore()
            self.active = False

    def __enter__(self) -> "Activation":
        return self

    def __exit__(self, *exc_info) -> None:
        self.restore()


def instrument(client: Any, config: InterceptorConfig | None = None) -> Activation:
    """Wrap one client object's ``messages.create`` in place."""
    config = config or InterceptorConfig()
    messages = getattr(client, "messages", None)
    create = getattr(messages, "create", None)
    if create is None:
        warnings.warn("client has no messages.create surface; interceptor not installed")
        return Activation(False, "no-op: unsupported client")

    gateway = GatewayClient(config.gateway_url)

    @functools.wraps(create)
    def gated_create(*args: Any, **kwargs: Any) -> Any:
        return gate_response(create(*args, **kwargs), config, gateway)

    messages.create = gated_create

    def restore() -> None:
        messages.create = create
        gateway.close()

    return Activation(True, f"instrumented {type(client).__name__}", restore)


def auto(config: InterceptorConfig | None = None) -> Activation:
    """Patch every supported client library that is importable.

    Currently the Anthropic Python SDK is the reference integration; when
    no supported library is present this warns and returns a no-op
    handle, leaving the process unchanged.
    """
    config = config or InterceptorConfig()
    try:
        from anthropic.resources.messages import Messages  # type: ignore[import-not-found]
    except ImportError:
        warnings.warn("no supported client library found; tool-call interception inactive")
        return Activation(False, "no-op: no supported client library")

    original = Messages.create
    gateway = GatewayClient(config.gateway_url)

    @functools.wraps(original)
    def gated_create(self: Any, *args: Any, **kwargs: Any) -> Any:
        return gate_response(original(self, *args, **kwargs), config, gateway)

    Messages.create = gated_create  # type: ignore[method-assign]

    def restore() -> None:
        Messages.create = original  # type: ignore[method-assign]
        gateway.close()

    return Activation(True, "instrumented anthropic.resources.messages.Messages.create", restore)
