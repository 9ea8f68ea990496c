"""Operator command line: serve, replay, bench, corpus and chain tooling."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .audit import (
    AuditStore,
    load_exported_records,
    load_key_bundle,
    summarize_report,
    verify_chain,
)
from .config import load_config
from .harness import (
    HarnessError,
    bench_latency,
    build_attack_corpus,
    gen_benign,
    load_corpus,
    replay,
    save_corpus,
)


@click.group()
def main() -> None:
    """Pre-execution firewall for agent tool calls."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file; TOOLGATE_* env vars override it.")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--store", "store_path", default=None, help="Audit store path.")
@click.option("--policies", "policy_dir", default=None, help="Policy directory.")
@click.option("--registry", "registry_path", default=None, help="Pattern registry file.")
def serve(config_path, host, port, store_path, policy_dir, registry_path) -> None:
    """Start the enforcement gateway."""
    import logging

    import uvicorn

    from .gateway import create_app

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    try:
        config = load_config(config_path)
    except (ValueError, OSError) as exc:
        raise click.ClickException(f"bad config: {exc}")
    if host:
        config.host = host
    if port:
        config.port = port
    if store_path:
        config.store_path = store_path
    if policy_dir:
        config.policy_dir = policy_dir
    if registry_path:
        config.registry_path = registry_path

    try:
        app = create_app(config)
    except Exception as exc:  # bad registry or policy: refuse to start
        raise click.ClickException(f"refusing to start: {exc}")
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


@main.command("replay")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--endpoint", default="http://127.0.0.1:8400")
@click.option("--json", "json_out", type=click.Path(), default=None)
def replay_cmd(corpus_dir, endpoint, json_out) -> None:
    """Replay a corpus directory against a running gateway."""
    cases = load_corpus(corpus_dir)
    try:
        report = replay(cases, endpoint)
    except HarnessError as exc:
        raise click.ClickException(str(exc))
    click.echo(report.to_text())
    if json_out:
        Path(json_out).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    sys.exit(0 if report.failed == 0 else 1)


@main.command()
@click.option("--n", default=1000, show_default=True)
@click.option("--warmup", default=100, show_default=True)
@click.option("--endpoint", default="http://127.0.0.1:8400")
def bench(n, warmup, endpoint) -> None:
    """Measure end-to-end check latency over loopback."""
    try:
        stats = bench_latency(n, endpoint, warmup=warmup)
    except HarnessError as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps(stats, indent=2))


@main.command("gen-benign")
@click.option("--n", default=500, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def gen_benign_cmd(n, seed, out_dir) -> None:
    """Write the seeded benign corpus (one JSON file per case)."""
    save_corpus(gen_benign(n, seed), out_dir)
    click.echo(f"wrote {n} benign cases to {out_dir}")


@main.command("gen-attacks")
@click.option("--out", "out_dir", required=True, type=click.Path())
def gen_attacks_cmd(out_dir) -> None:
    """Write the 48-case attack corpus (one JSON file per case)."""
    cases = build_attack_corpus()
    save_corpus(cases, out_dir)
    click.echo(f"wrote {len(cases)} attack cases to {out_dir}")


@main.command("verify-chain")
@click.argument("export_path", type=click.Path(exists=True))
@click.argument("keys_path", type=click.Path(exists=True))
def verify_chain_cmd(export_path, keys_path) -> None:
    """Verify an exported chain offline; exit 0 if intact, 1 if not."""
    records = load_exported_records(export_path)
    keys = load_key_bundle(keys_path)
    report = verify_chain(records, keys)
    click.echo(json.dumps(report.to_wire()))
    sys.exit(0 if report.valid else 1)


@main.command("export")
@click.option("--store", "store_path", default="toolgate.db", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--keys", "keys_path", type=click.Path(), default=None,
              help="Also write the public-key bundle here.")
def export_cmd(store_path, out_path, keys_path) -> None:
    """Export the audit chain as JSON lines plus a summary."""
    store = AuditStore(store_path)
    try:
        report = store.write_export(out_path, keys_path)
    finally:
        store.close()
    click.echo(summarize_report(report))


if __name__ == "__main__":
    main()
