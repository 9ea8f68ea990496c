"""HTTP enforcement service: the mediation point for every tool call.

POST /api/v1/check runs the pipeline -- rate limit, deep string
extraction, risk scanning with PII detection, classification, policy
validation -- then maps the outcome to a decision:

1. any policy violation            -> block
2. extraction truncated            -> block (synthetic "depth_evasion")
3. any CRITICAL signal             -> block
4. any HIGH signal                 -> pending (queued for human review)
5. otherwise                       -> allow

Every decision is committed to the signed audit chain before the
response leaves the process; if the chain cannot accept the record the
check fails closed. Rate-limited requests get 429 without a decision so
throttling stays distinguishable from policy denial.
"""

from __future__ import annotations

import logging
import time
from typing import Any, Callable

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .approvals import ApprovalQueue, ReviewConflict, UnknownReview
from .audit import AuditStore, AuditUnavailable
from .config import GatewayConfig
from .extraction import extract_strings
from .model import Category, Decision, RiskLevel, RiskSignal
from .policy import PolicyStore, load_policy_dir
from .ratelimit import RevocationTracker, SlidingWindowLimiter
from .registry import load_registry
from .scanner import Scanner, summarize_pii

logger = logging.getLogger("toolgate.gateway")


class CheckRequestModel(BaseModel):
    model_config = ConfigDict(extra="ignore")

    agent_id: str = Field(min_length=1)
    tool_name: str = Field(min_length=1)
    arguments: Any
    session_id: str | None = None


class ReviewRequestModel(BaseModel):
    model_config = ConfigDict(extra="ignore")

    decision: str
    reviewer: str = Field(min_length=1)


class GatewayContext:
    """Shared state wired once at startup; immutable configuration after."""

    def __init__(
        self,
        config: GatewayConfig,
        *,
        clock: Callable[[], float] | None = None,
        wall_clock: Callable[[], float] | None = None,
    ) -> None:
        self.config = config
        registry = load_registry(config.registry_path)
        logger.info("pattern registry loaded: %s (sha256 %s)", registry.source, registry.checksum)
        self.scanner = Scanner(registry, internal_hosts=config.internal_hosts)
        self.policies: PolicyStore = load_policy_dir(config.resolved_policy_dir())
        logger.info("policy store loaded: %d policies", len(self.policies))
        self.audit = AuditStore(config.store_path)
        mono = clock or time.monotonic
        wall = wall_clock or time.time
        self.approvals = ApprovalQueue(timeout_s=config.approval_timeout_s, clock=wall)
        self.limiter = SlidingWindowLimiter(
            limit=config.rate_limit, window_s=config.rate_window_s, clock=mono
        )
        self.revocations = RevocationTracker(
            threshold=config.revoke_threshold, window_s=config.revoke_window_s, clock=mono
        )
        self.overrides = {
            tool: Category(category) for tool, category in config.tool_overrides.items()
        }


def _signal(pattern: str, detail: str, severity: RiskLevel = RiskLevel.CRITICAL) -> RiskSignal:
    return RiskSignal(pattern=pattern, detail=detail, severity=severity)


def _wire_response(
    *,
    trace_id: str,
    decision: Decision,
    risk_level: RiskLevel,
    signals: list[RiskSignal],
    category: Category,
    violations: list | None = None,
    pii_types: list | None = None,
    pii_count: int | None = None,
) -> dict:
    body: dict[str, Any] = {
        "trace_id": trace_id,
        "decision": decision.value,
        "risk_level": risk_level.value,
        "risk_signals": [s.to_wire() for s in signals],
        "category": category.value,
    }
    if violations:
        body["violations"] = [v.to_wire() for v in violations]
    if decision is Decision.PENDING:
        body["approval_url"] = f"/cockpit/review/{trace_id}"
    if pii_types:
        body["pii_types"] = [t.value for t in pii_types]
        body["pii_count"] = pii_count
    return body


def create_app(
    config: GatewayConfig | None = None,
    *,
    clock: Callable[[], float] | None = None,
    wall_clock: Callable[[], float] | None = None,
) -> FastAPI:
    """Build the service; raises at once on a bad registry or policy dir."""
    ctx = GatewayContext(config or GatewayConfig(), clock=clock, wall_clock=wall_clock)
    app = FastAPI(title="toolgate", docs_url=None, redoc_url=None)
    app.state.ctx = ctx

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:3])})

    @app.middleware("http")
    async def body_size_guard(request: Request, call_next):
        length = request.headers.get("content-length")
        if length is not None:
            try:
                if int(length) > ctx.config.max_body_bytes:
                    return JSONResponse(status_code=413, content={"error": "request body too large"})
            except ValueError:
                return JSONResponse(status_code=400, content={"error": "bad content-length"})
        return await call_next(request)

    # -- mediation ---------------------------------------------------------

    @app.post("/api/v1/check")
    def check(req: CheckRequestModel):
        if not ctx.limiter.allow(req.agent_id):
            return JSONResponse(
                status_code=429,
                content={"error": "rate limit exceeded"},
                headers={"Retry-After": str(int(ctx.config.rate_window_s))},
            )
        started = time.perf_counter()

        if ctx.revocations.is_revoked(req.agent_id):
            signals = [_signal("agent_revoked", "Agent access revoked after repeated violations")]
            category, _ = ctx.scanner.classify(req.tool_name, [], ctx.overrides)
            return _finish(
                req,
                decision=Decision.BLOCK,
                risk_level=RiskLevel.CRITICAL,
                signals=signals,
                category=category,
                started=started,
                count_for_revocation=False,
            )

        try:
            return _run_pipeline(req, started)
        except AuditUnavailable:
            raise
        except Exception:  # fail closed on an unexpected pipeline fault
            logger.exception("pipeline failure for tool %s", req.tool_name)
            signals = [_signal("gateway_error", "Internal enforcement failure; failing closed")]
            return _finish(
                req,
                decision=Decision.BLOCK,
                risk_level=RiskLevel.CRITICAL,
                signals=signals,
                category=Category.GENERIC,
                started=started,
                count_for_revocation=False,
            )

    def _run_pipeline(req: CheckRequestModel, started: float):
        extraction = extract_strings(req.arguments)
        pii = ctx.scanner.detect_pii(extraction.strings)
        signals = ctx.scanner.scan(extraction.strings, req.tool_name, pii_findings=pii)
        if extraction.truncated:
            signals = signals + [
                _signal(
                    "depth_evasion",
                    f"Argument tree truncated ({extraction.truncation_reason.value});"
                    " treated as hostile",
                )
            ]
        category, risk_level = ctx.scanner.classify(req.tool_name, signals, ctx.overrides)
        violations = ctx.policies.validate(req.tool_name, category, req.arguments)

        if violations:
            decision = Decision.BLOCK
        elif extraction.truncated:
            decision = Decision.BLOCK
        elif risk_level is RiskLevel.CRITICAL:
            decision = Decision.BLOCK
        elif risk_level is RiskLevel.HIGH:
            decision = Decision.PENDING
        else:
            decision = Decision.ALLOW

        pii_types, pii_count = summarize_pii(pii) if pii else ([], 0)
        return _finish(
            req,
            decision=decision,
            risk_level=risk_level,
            signals=signals,
            category=category,
            violations=violations,
            pii_types=pii_types,
            pii_count=pii_count,
            started=started,
        )

    def _finish(
        req: CheckRequestModel,
        *,
        decision: Decision,
        risk_level: RiskLevel,
        signals: list[RiskSignal],
        category: Category,
        started: float,
        violations: list | None = None,
        pii_types: list | None = None,
        pii_count: int | None = None,
        count_for_revocation: bool = True,
    ):
        latency_ms = (time.perf_counter() - started) * 1000.0
        try:
            record = ctx.audit.append(
                agent_id=req.agent_id,
                tool_name=req.tool_name,
                arguments=req.arguments,
                session_id=req.session_id,
                decision=decision,
                risk_level=risk_level,
                risk_signals=signals,
                category=category,
                latency_ms=latency_ms,
                auto_register=ctx.config.auto_register_agents,
            )
        except AuditUnavailable as exc:
            logger.error("audit append failed, failing closed: %s", exc)
            body = _wire_response(
                trace_id="",
                decision=Decision.BLOCK,
                risk_level=RiskLevel.CRITICAL,
                signals=signals + [_signal("audit_failure", "Audit chain unavailable; failing closed")],
                category=category,
            )
            body.pop("trace_id")
            return JSONResponse(status_code=200, content=body)

        if decision is Decision.PENDING:
            ctx.approvals.enqueue(
                record.trace_id,
                {
                    "agent_id": req.agent_id,
                    "tool_name": req.tool_name,
                    "arguments": req.arguments,
                    "session_id": req.session_id,
                },
                [s.to_wire() for s in signals],
            )
        if decision is Decision.BLOCK and count_for_revocation:
            if ctx.revocations.record_block(req.agent_id):
                logger.warning("agent %s auto-revoked after repeated blocks", req.agent_id)

        return JSONResponse(
            status_code=200,
            content=_wire_response(
                trace_id=record.trace_id,
                decision=decision,
                risk_level=risk_level,
                signals=signals,
                category=category,
                violations=violations,
                pii_types=pii_types,
                pii_count=pii_count,
            ),
        )

    # -- decisions and reviews ----------------------------------------------

    @app.get("/api/v1/decision/{trace_id}")
    def decision(trace_id: str):
        try:
            return {"decision": ctx.approvals.poll(trace_id)}
        except UnknownReview:
            pass
        record = ctx.audit.get(trace_id)
        if record is None:
            return JSONResponse(status_code=404, content={"error": "unknown trace_id"})
        if record.decision is Decision.PENDING:
            # The queue no longer knows this entry (e.g. restart); fail closed.
            return {"decision": "block"}
        value = record.decision.value.replace("resolved_", "")
        return {"decision": value}

    @app.get("/api/v1/reviews")
    def reviews(status: str | None = "pending"):
        entries = ctx.approvals.listing(status=status)
        return {"reviews": [e.to_wire() for e in entries]}

    @app.post("/api/v1/review/{trace_id}")
    def review(trace_id: str, body: ReviewRequestModel):
        if body.decision not in ("allow", "block"):
            return JSONResponse(status_code=400, content={"error": "decision must be allow or block"})
        try:
            entry = ctx.approvals.resolve(trace_id, body.decision, body.reviewer)
        except UnknownReview:
            return JSONResponse(status_code=404, content={"error": "unknown trace_id"})
        except ReviewConflict as exc:
            return JSONResponse(
                status_code=409,
                content={"error": "already resolved", "status": exc.entry.status.value},
            )

        request = entry.request
        resolution = (
            Decision.RESOLVED_ALLOW if body.decision == "allow" else Decision.RESOLVED_BLOCK
        )
        original = ctx.audit.get(trace_id)
        try:
            ctx.audit.append(
                agent_id=request.get("agent_id", "unknown"),
                tool_name=request.get("tool_name", "unknown"),
                arguments=request.get("arguments"),
                session_id=request.get("session_id"),
                decision=resolution,
                risk_level=original.risk_level if original else RiskLevel.HIGH,
                risk_signals=[
                    RiskSignal(s["pattern"], s["detail"], RiskLevel(s["severity"]))
                    for s in entry.risk_signals
                ],
                category=original.category if original else Category.GENERIC,
                reviewer=body.reviewer,
                parent_trace_id=trace_id,
                auto_register=ctx.config.auto_register_agents,
            )
        except AuditUnavailable as exc:
            logger.error("resolution audit append failed: %s", exc)
            return JSONResponse(
                status_code=500,
                content={"error": "resolution recorded but audit append failed"},
            )
        return {"trace_id": trace_id, "status": entry.status.value, "reviewer": entry.reviewer}

    # -- observability -------------------------------------------------------

    @app.get("/api/v1/traces")
    def traces(since: int | None = None, limit: int = 100):
        records = ctx.audit.feed(since=since, limit=min(limit, 500))
        return {
            "traces": [
                {
                    "trace_id": r.trace_id,
                    "agent_id": r.agent_id,
                    "tool_name": r.tool_name,
                    "decision": r.decision.value,
                    "risk_level": r.risk_level.value,
                    "category": r.category.value,
                    "timestamp": r.timestamp,
                }
                for r in records
            ]
        }

    @app.get("/api/v1/traces/{trace_id}")
    def trace_detail(trace_id: str):
        record = ctx.audit.get(trace_id)
        if record is None:
            return JSONResponse(status_code=404, content={"error": "unknown trace_id"})
        wire = record.to_wire()
        wire["tool_call"]["arguments"] = ctx.scanner.redact_tree(wire["tool_call"]["arguments"])
        wire["chain_position"] = record.chain_index
        return wire

    @app.get("/api/v1/policies")
    def policies():
        return {
            "policies": [
                {
                    "id": p.id,
                    "name": p.name,
                    "category": p.category,
                    "risk_level": p.risk_level.value,
                }
                for p in ctx.policies.policies
            ]
        }

    @app.get("/api/v1/chain/status")
    def chain_status():
        report = ctx.audit.verify()
        wire = report.to_wire()
        wire["total_records"] = ctx.audit.count()
        wire["registry_checksum"] = ctx.scanner.registry.checksum
        return wire

    @app.post("/api/v1/agents/{agent_id}/revoke")
    def revoke(agent_id: str):
        ctx.revocations.revoke(agent_id)
        return {"agent_id": agent_id, "revoked": True}

    @app.delete("/api/v1/agents/{agent_id}/revoke")
    def unrevoke(agent_id: str):
        ctx.revocations.unrevoke(agent_id)
        return {"agent_id": agent_id, "revoked": False}

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    return app
