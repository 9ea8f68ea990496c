/**
 * HTML renderers. Pure string-in string-out so they can be unit tested
 * without a DOM; main.ts assigns the output to container elements and
 * handles events by delegation.
 *
 * Every dynamic value is escaped; the gateway already redacts PII in
 * trace details server-side, and queue arguments sit behind an explicit
 * reveal toggle.
 */

import type {
  ChainStatus,
  FeedEntry,
  PendingReview,
  PolicySummary,
  TraceDetail,
} from "./api.js";
import {
  decisionClass,
  escapeHtml,
  formatArguments,
  formatTimestamp,
  riskClass,
} from "./state.js";

export function renderEmpty(message: string): string {
  return `<p class="empty">${escapeHtml(message)}</p>`;
}

export function renderFeed(entries: FeedEntry[]): string {
  if (!entries.length) return renderEmpty("No traces yet.");
  const rows = entries
    .map(
      (entry) => `
  <tr class="feed-row" data-trace="${escapeHtml(entry.trace_id)}">
    <td class="mono">${formatTimestamp(entry.timestamp)}</td>
    <td class="mono trace-link">${escapeHtml(entry.trace_id)}</td>
    <td>${escapeHtml(entry.agent_id)}</td>
    <td class="mono">${escapeHtml(entry.tool_name)}</td>
    <td><span class="${decisionClass(entry.decision)}">${escapeHtml(entry.decision)}</span></td>
    <td><span class="${riskClass(entry.risk_level)}">${escapeHtml(entry.risk_level)}</span></td>
    <td>${escapeHtml(entry.category)}</td>
  </tr>`,
    )
    .join("");
  return `<table class="feed">
  <thead><tr><th>time (UTC)</th><th>trace</th><th>agent</th><th>tool</th><th>decision</th><th>risk</th><th>category</th></tr></thead>
  <tbody>${rows}</tbody>
</table>`;
}

function renderSignals(review: PendingReview): string {
  if (!review.risk_signals.length) return "";
  const items = review.risk_signals
    .map(
      (signal) => `
    <li><span class="${riskClass(signal.severity)}">${escapeHtml(signal.severity)}</span>
      <span class="mono">${escapeHtml(signal.pattern)}</span>
      ${escapeHtml(signal.detail)}</li>`,
    )
    .join("");
  return `<ul class="signals">${items}</ul>`;
}

export function renderQueue(entries: PendingReview[]): string {
  if (!entries.length) return renderEmpty("No calls waiting for review.");
  const cards = entries
    .map(
      (review) => `
<article class="review-card" data-trace="${escapeHtml(review.trace_id)}">
  <header>
    <span class="mono">${escapeHtml(review.trace_id)}</span>
    <span>${escapeHtml(review.request.agent_id)}</span>
    <span class="mono">${escapeHtml(review.request.tool_name)}</span>
    <span class="mono">${formatTimestamp(review.created_at * 1000)}</span>
  </header>
  ${renderSignals(review)}
  <details>
    <summary>Show full arguments</summary>
    <pre class="mono">${escapeHtml(formatArguments(review.request.arguments))}</pre>
  </details>
  <footer>
    <button class="btn btn-allow" data-action="allow" data-trace="${escapeHtml(review.trace_id)}">Allow</button>
    <button class="btn btn-block" data-action="block" data-trace="${escapeHtml(review.trace_id)}">Block</button>
  </footer>
</article>`,
    )
    .join("");
  return `<div class="queue">${cards}</div>`;
}

export function renderTrace(detail: TraceDetail): string {
  const signals = detail.risk_signals
    .map(
      (signal) => `
    <li><span class="${riskClass(signal.severity)}">${escapeHtml(signal.severity)}</span>
      <span class="mono">${escapeHtml(signal.pattern)}</span>
      ${escapeHtml(signal.detail)}</li>`,
    )
    .join("");
  const latency =
    detail.latency_ms === undefined ? "n/a" : `${detail.latency_ms.toFixed(2)} ms`;
  return `<section class="trace-detail">
  <h2 class="mono">${escapeHtml(detail.trace_id)}</h2>
  <dl>
    <dt>decision</dt><dd><span class="${decisionClass(detail.decision)}">${escapeHtml(detail.decision)}</span></dd>
    <dt>risk level</dt><dd><span class="${riskClass(detail.risk_level)}">${escapeHtml(detail.risk_level)}</span></dd>
    <dt>category</dt><dd>${escapeHtml(detail.category)}</dd>
    <dt>agent</dt><dd>${escapeHtml(detail.agent_id)}</dd>
    <dt>tool</dt><dd class="mono">${escapeHtml(detail.tool_call.tool_name)}</dd>
    <dt>time (UTC)</dt><dd class="mono">${formatTimestamp(detail.timestamp)}</dd>
    <dt>latency</dt><dd>${latency}</dd>
    <dt>chain position</dt><dd>#${detail.chain_position}</dd>
    <dt>integrity hash</dt><dd class="mono hash">${escapeHtml(detail.integrity_hash)}</dd>
  </dl>
  <h3>Signals</h3>
  ${signals ? `<ul class="signals">${signals}</ul>` : renderEmpty("No signals.")}
  <h3>Arguments (PII redacted)</h3>
  <pre class="mono">${escapeHtml(formatArguments(detail.tool_call.arguments))}</pre>
</section>`;
}

export function renderPolicies(policies: PolicySummary[]): string {
  if (!policies.length) return renderEmpty("No policies loaded.");
  const rows = policies
    .map(
      (policy) => `
  <tr>
    <td class="mono">${escapeHtml(policy.id)}</td>
    <td>${escapeHtml(policy.name)}</td>
    <td>${escapeHtml(policy.category)}</td>
    <td><span class="${riskClass(policy.risk_level)}">${escapeHtml(policy.risk_level)}</span></td>
  </tr>`,
    )
    .join("");
  return `<table class="policies">
  <thead><tr><th>id</th><th>name</th><th>category</th><th>risk level</th></tr></thead>
  <tbody>${rows}</tbody>
</table>`;
}

export function renderChain(status: ChainStatus): string {
  const verdict = status.valid
    ? `<span class="decision decision-allow">intact</span>`
    : `<span class="decision decision-block">INVALID at #${status.first_bad_index}` +
      ` (${escapeHtml(status.failure_kind ?? "unknown")})</span>`;
  return `<section class="chain-status">
  <dl>
    <dt>chain</dt><dd>${verdict}</dd>
    <dt>records</dt><dd>${status.total_records}</dd>
    <dt>pattern registry</dt><dd class="mono hash">${escapeHtml(status.registry_checksum)}</dd>
  </dl>
</section>`;
}

export function renderConflictNotice(traceId: string): string {
  return `<div class="notice">Another reviewer already resolved <span class="mono">${escapeHtml(
    traceId,
  )}</span>; refreshing the queue.</div>`;
}
