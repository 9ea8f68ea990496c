"""Pre-execution firewall and signed audit trail for AI agent tool calls.

The gateway mediates every tool invocation before side effects occur:
argument strings are extracted to a bounded depth, scanned against a
versioned detection-pattern registry, checked against JSON Schema
policies, and the resulting allow/block/pending decision is written to a
tamper-evident, Ed25519-signed hash chain.
"""

__version__ = "0.1.0"
