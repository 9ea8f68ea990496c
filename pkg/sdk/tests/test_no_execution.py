"""The no-execution guarantee, measured over the generated corpora."""

from __future__ import annotations

from toolgate_sdk import InterceptorConfig, instrument

from demo_agent import FakeClient, run_agent_turn, tool_use_response


def test_attack_corpus_never_reaches_the_tool(gateway_url, attack_corpus):
    assert len(attack_corpus) == 48
    config = InterceptorConfig(
        gateway_url=gateway_url,
        agent_id="sdk-attack-run",
        poll_interval=0.1,
        poll_timeout=0.5,  # a pending attack would still fail closed quickly
        fail_mode="closed",
    )
    client = FakeClient()
    invocations: list[str] = []
    with instrument(client, config):
        for case in attack_corpus:
            run_agent_turn(
                client,
                tool_use_response(case["request"]["tool_name"], case["request"]["arguments"]),
                lambda name, args: invocations.append(name),
            )
    assert invocations == []


def test_benign_corpus_executes_exactly_the_allowed_calls(gateway_url, benign_corpus):
    assert len(benign_corpus) == 500
    config = InterceptorConfig(
        gateway_url=gateway_url,
        agent_id="sdk-benign-run",
        poll_interval=0.1,
        poll_timeout=0.5,
        fail_mode="closed",
    )
    client = FakeClient()
    invocations: list[str] = []
    with instrument(client, config):
        for case in benign_corpus:
            run_agent_turn(
                client,
                tool_use_response(case["request"]["tool_name"], case["request"]["arguments"]),
                lambda name, args: invocations.append(name),
            )
    # The planted disjunctive-WHERE cases are the only non-allow outcomes.
    expected_allows = sum(1 for case in benign_corpus if not case.get("tolerated_fp"))
    assert len(invocations) == expected_allows
