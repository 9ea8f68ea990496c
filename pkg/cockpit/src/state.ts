/** Client-side stores and formatting helpers; all data comes from polling. */

import type { FeedEntry, PendingReview } from "./api.js";

const FEED_CAP = 500;

export class FeedStore {
  entries: FeedEntry[] = [];

  /** Newest timestamp seen, for incremental `since` polling. */
  latestTimestamp(): number | undefined {
    return this.entries.length ? this.entries[0].timestamp : undefined;
  }

  /** Merge a poll result: dedupe by trace_id, keep newest-first order. */
  merge(incoming: FeedEntry[]): void {
    const known = new Map(this.entries.map((e) => [e.trace_id, e]));
    for (const entry of incoming) {
      known.set(entry.trace_id, entry);
    }
    this.entries = [...known.values()]
      .sort((a, b) => b.timestamp - a.timestamp || a.trace_id.localeCompare(b.trace_id))
      .slice(0, FEED_CAP);
  }
}

export class QueueStore {
  entries: PendingReview[] = [];

  replace(entries: PendingReview[]): void {
    this.entries = [...entries].sort(
      (a, b) => a.created_at - b.created_at || a.trace_id.localeCompare(b.trace_id),
    );
  }

  /** Optimistically drop an entry while its review posts; returns it for revert. */
  optimisticRemove(traceId: string): PendingReview | undefined {
    const entry = this.entries.find((e) => e.trace_id === traceId);
    this.entries = this.entries.filter((e) => e.trace_id !== traceId);
    return entry;
  }

  /** Revert an optimistic removal after a conflict. */
  restore(entry: PendingReview): void {
    this.replace([...this.entries, entry]);
  }
}

export function riskClass(level: string): string {
  switch (level.toUpperCase()) {
    case "CRITICAL":
      return "badge badge-critical";
    case "HIGH":
      return "badge badge-high";
    case "MEDIUM":
      return "badge badge-medium";
    default:
      return "badge badge-low";
  }
}

export function decisionClass(decision: string): string {
  if (decision === "allow" || decision === "resolved_allow") return "decision decision-allow";
  if (decision === "pending") return "decision decision-pending";
  return "decision decision-block";
}

export function formatTimestamp(ms: number): string {
  return new Date(ms).toISOString().replace("T", " ").slice(0, 19);
}

export function escapeHtml(value: string): string {
  return value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function formatArguments(args: unknown): string {
  return JSON.stringify(args, null, 2) ?? "null";
}
