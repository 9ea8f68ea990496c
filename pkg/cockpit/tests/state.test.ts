import { describe, expect, it } from "vitest";

import type { FeedEntry, PendingReview } from "../src/api.js";
import {
  FeedStore,
  QueueStore,
  escapeHtml,
  formatTimestamp,
  riskClass,
} from "../src/state.js";

function entry(traceId: string, timestamp: number): FeedEntry {
  return {
    trace_id: traceId,
    agent_id: "a",
    tool_name: "t",
    decision: "allow",
    risk_level: "LOW",
    category: "generic",
    timestamp,
  };
}

function review(traceId: string, createdAt: number): PendingReview {
  return {
    trace_id: traceId,
    created_at: createdAt,
    request: { agent_id: "a", tool_name: "t", arguments: {} },
    risk_signals: [],
    status: "pending",
    reviewer: null,
    approval_url: `/cockpit/review/${traceId}`,
  };
}

describe("FeedStore", () => {
  it("orders newest first and dedupes by trace id", () => {
    const store = new FeedStore();
    store.merge([entry("a", 100), entry("b", 300)]);
    store.merge([entry("c", 200), entry("b", 300)]);
    expect(store.entries.map((e) => e.trace_id)).toEqual(["b", "c", "a"]);
  });

  it("reports the newest timestamp for incremental polling", () => {
    const store = new FeedStore();
    expect(store.latestTimestamp()).toBeUndefined();
    store.merge([entry("a", 100), entry("b", 300)]);
    expect(store.latestTimestamp()).toBe(300);
  });

  it("updates an entry in place when it reappears with new fields", () => {
    const store = new FeedStore();
    store.merge([entry("a", 100)]);
    store.merge([{ ...entry("a", 100), decision: "resolved_allow" }]);
    expect(store.entries).toHaveLength(1);
    expect(store.entries[0].decision).toBe("resolved_allow");
  });

  it("caps retained history", () => {
    const store = new FeedStore();
    store.merge(Array.from({ length: 600 }, (_, i) => entry(`t${i}`, i)));
    expect(store.entries.length).toBe(500);
    expect(store.entries[0].timestamp).toBe(599);
  });
});

describe("QueueStore", () => {
  it("keeps FIFO order by creation time", () => {
    const store = new QueueStore();
    store.replace([review("late", 30), review("early", 10), review("mid", 20)]);
    expect(store.entries.map((e) => e.trace_id)).toEqual(["early", "mid", "late"]);
  });

  it("optimistic removal returns the entry and revert restores order", () => {
    const store = new QueueStore();
    store.replace([review("a", 1), review("b", 2), review("c", 3)]);
    const removed = store.optimisticRemove("b");
    expect(removed?.trace_id).toBe("b");
    expect(store.entries.map((e) => e.trace_id)).toEqual(["a", "c"]);
    store.restore(removed!);
    expect(store.entries.map((e) => e.trace_id)).toEqual(["a", "b", "c"]);
  });

  it("removing an unknown id is a no-op", () => {
    const store = new QueueStore();
    store.replace([review("a", 1)]);
    expect(store.optimisticRemove("nope")).toBeUndefined();
    expect(store.entries).toHaveLength(1);
  });
});

describe("formatting", () => {
  it("escapes HTML-significant characters", () => {
    expect(escapeHtml(`<img src="x" onerror='alert(1)'>&`)).toBe(
      "&lt;img src=&quot;x&quot; onerror=&#39;alert(1)&#39;&gt;&amp;",
    );
  });

  it("renders UTC timestamps", () => {
    expect(formatTimestamp(0)).toBe("1970-01-01 00:00:00");
    expect(formatTimestamp(1700000000000)).toBe("2023-11-14 22:13:20");
  });

  it("maps severities to badge classes", () => {
    expect(riskClass("CRITICAL")).toContain("critical");
    expect(riskClass("high")).toContain("high");
    expect(riskClass("LOW")).toContain("low");
    expect(riskClass("unknown")).toContain("low");
  });
});
