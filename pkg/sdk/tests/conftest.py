"""Shared fixtures: a real gateway subprocess and generated corpora.

The gateway is started through its CLI and spoken to over HTTP only;
corpora are materialized with the corpus subcommands and read back from
their JSON files.
"""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="session")
def gateway_url(tmp_path_factory) -> str:
    tmp = tmp_path_factory.mktemp("gateway")
    port = _free_port()
    config_path = tmp / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "port": port,
                "store_path": str(tmp / "audit.db"),
                # Corpus runs reuse one agent id; window and revocation
                # behavior have their own tests on the gateway side.
                "rate_limit": 1_000_000,
                "revoke_threshold": 1_000_000,
            }
        )
    )
    proc = subprocess.Popen(
        [sys.executable, "-m", "toolgate.cli", "serve", "--config", str(config_path)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    url = f"http://127.0.0.1:{port}"
    deadline = time.monotonic() + 30
    try:
        while True:
            try:
                if httpx.get(url + "/healthz", timeout=1.0).status_code == 200:
                    break
            except httpx.HTTPError:
                pass
            if time.monotonic() > deadline:
                raise RuntimeError("gateway did not come up")
            time.sleep(0.1)
        yield url
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def _load_corpus_dir(directory: Path) -> list[dict]:
    cases = []
    for path in sorted(directory.glob("*.json")):
        if path.name == "manifest.json":
            continue
        cases.append(json.loads(path.read_text()))
    return cases


@pytest.fixture(scope="session")
def attack_corpus(tmp_path_factory) -> list[dict]:
    out = tmp_path_factory.mktemp("corpora") / "attacks"
    subprocess.run(
        [sys.executable, "-m", "toolgate.cli", "gen-attacks", "--out", str(out)],
        check=True,
        capture_output=True,
    )
    return _load_corpus_dir(out)


@pytest.fixture(scope="session")
def benign_corpus(tmp_path_factory) -> list[dict]:
    out = tmp_path_factory.mktemp("corpora") / "benign"
    subprocess.run(
        [
            sys.executable, "-m", "toolgate.cli", "gen-benign",
            "--n", "500", "--seed", "42", "--out", str(out),
        ],
        check=True,
        capture_output=True,
    )
    return _load_corpus_dir(out)
