"""A minimal tool-using agent around an Anthropic-shaped fake client.

The host loop mirrors what real agent frameworks do: ask the client for
a response, then dispatch every tool_use block it can see to the tool
executor. With the interceptor installed, denied tool calls never reach
the executor because their blocks are rewritten before the host sees
them.
"""

from __future__ import annotations

from types import SimpleNamespace
from typing import Any, Callable


def text_response(text: str) -> SimpleNamespace:
    return SimpleNamespace(
        id="msg_text",
        role="assistant",
        content=[SimpleNamespace(type="text", text=text)],
        stop_reason="end_turn",
    )


def tool_use_response(tool_name: str, arguments: Any, *, preamble: str = "Working on it.") -> SimpleNamespace:
    return SimpleNamespace(
        id="msg_tool",
        role="assistant",
        content=[
            SimpleNamespace(type="text", text=preamble),
            SimpleNamespace(type="tool_use", id="toolu_01", name=tool_name, input=arguments),
        ],
        stop_reason="tool_use",
    )


class FakeMessages:
    def __init__(self) -> None:
        self.scripted: list[Any] = []
        self.calls = 0

    def create(self, **kwargs: Any) -> Any:
        self.calls += 1
        return self.scripted.pop(0)


class FakeClient:
    """Shape-compatible stand-in for the real messages client."""

    def __init__(self) -> None:
        self.messages = FakeMessages()


def block_type(block: Any) -> str:
    return block["type"] if isinstance(block, dict) else getattr(block, "type", "")


def block_text(block: Any) -> str:
    return block["text"] if isinstance(block, dict) else getattr(block, "text", "")


def run_agent_turn(client: FakeClient, response: Any, execute_tool: Callable[[str, Any], None]) -> Any:
    """One agent step: get a response, execute every visible tool call."""
    client.messages.scripted.append(response)
    result = client.messages.create(model="demo-model", max_tokens=256, messages=[])
    for block in result.content:
        if block_type(block) == "tool_use":
            name = block["name"] if isinstance(block, dict) else block.name
            args = block["input"] if isinstance(block, dict) else block.input
            execute_tool(name, args)
    return result
