/**
 * Application shell: tab navigation, the 2-second polling loop, and
 * reviewer actions with optimistic queue updates that revert on
 * conflict. All state is derived from gateway polling; nothing persists
 * beyond the page session.
 */

import { GatewayClient, ReviewConflictError } from "./api.js";
import { FeedStore, QueueStore } from "./state.js";
import {
  renderChain,
  renderConflictNotice,
  renderEmpty,
  renderFeed,
  renderPolicies,
  renderQueue,
  renderTrace,
} from "./views.js";

const POLL_INTERVAL_MS = 2000;

type View = "feed" | "queue" | "trace" | "policies" | "chain";

function gatewayBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("gateway");
  return (fromQuery ?? "http://127.0.0.1:8400").replace(/\/+$/, "");
}

function must(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

export function startCockpit(): void {
  const client = new GatewayClient(gatewayBaseUrl());
  const feed = new FeedStore();
  const queue = new QueueStore();

  const content = must("content");
  const banner = must("banner");
  const notice = must("notice");
  let view: View = "feed";
  let currentTrace: string | null = null;
  let reviewer =
    window.localStorage.getItem("cockpit.reviewer") ?? `reviewer-${Date.now() % 10_000}`;
  window.localStorage.setItem("cockpit.reviewer", reviewer);

  function setStale(stale: boolean): void {
    banner.hidden = !stale;
  }

  async function refresh(): Promise<void> {
    try {
      switch (view) {
        case "feed": {
          feed.merge(await client.feed(feed.latestTimestamp()));
          content.innerHTML = renderFeed(feed.entries);
          break;
        }
        case "queue": {
          queue.replace(await client.queue());
          content.innerHTML = renderQueue(queue.entries);
          break;
        }
        case "trace": {
          content.innerHTML = currentTrace
            ? renderTrace(await client.trace(currentTrace))
            : renderEmpty("Pick a trace from the feed.");
          break;
        }
        case "policies": {
          content.innerHTML = renderPolicies(await client.policies());
          break;
        }
        case "chain": {
          content.innerHTML = renderChain(await client.chainStatus());
          break;
        }
      }
      setStale(false);
    } catch (error) {
      if (error instanceof ReviewConflictError) throw error;
      setStale(true); // keep the last rendered state; show the stale banner
    }
  }

  async function act(traceId: string, decision: "allow" | "block"): Promise<void> {
    const removed = queue.optimisticRemove(traceId);
    content.innerHTML = renderQueue(queue.entries);
    try {
      await client.review(traceId, decision, reviewer);
    } catch (error) {
      if (error instanceof ReviewConflictError && removed) {
        notice.innerHTML = renderConflictNotice(traceId);
        window.setTimeout(() => (notice.innerHTML = ""), 4000);
      } else if (removed) {
        queue.restore(removed); // transport error: put the entry back
        content.innerHTML = renderQueue(queue.entries);
      }
    }
    await refresh();
  }

  content.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const button = target.closest<HTMLElement>("button[data-action]");
    if (button && view === "queue") {
      const traceId = button.dataset.trace ?? "";
      void act(traceId, button.dataset.action === "allow" ? "allow" : "block");
      return;
    }
    const row = target.closest<HTMLElement>("tr[data-trace]");
    if (row && view === "feed") {
      currentTrace = row.dataset.trace ?? null;
      switchView("trace");
    }
  });

  function switchView(next: View): void {
    view = next;
    for (const tab of document.querySelectorAll<HTMLElement>("nav [data-view]")) {
      tab.classList.toggle("active", tab.dataset.view === view);
    }
    content.innerHTML = renderEmpty("Loading…");
    void refresh();
  }

  for (const tab of document.querySelectorAll<HTMLElement>("nav [data-view]")) {
    tab.addEventListener("click", () => switchView(tab.dataset.view as View));
  }

  switchView("feed");
  window.setInterval(() => void refresh(), POLL_INTERVAL_MS);
}

startCockpit();
