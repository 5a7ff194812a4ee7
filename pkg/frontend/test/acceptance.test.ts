/** Release criteria for the dashboard, against a fully mocked service. */

import { describe, expect, it } from "vitest";

import { FetchLike, fetchConfig, submitConfig } from "../src/configForm.js";
import { buildHistoryView } from "../src/history.js";
import { initialState, LIVE_FEED_CAPACITY, pushEvent } from "../src/state.js";
import { connectStream, SocketLike } from "../src/stream.js";
import { EventRecord, ServiceConfigForm } from "../src/types.js";

function report(ok: boolean, name: string, detail = ""): void {
  // eslint-disable-next-line no-console
  console.log(`[${ok ? "PASS" : "FAIL"}] ${name}${detail ? ` (${detail})` : ""}`);
  expect(ok, name).toBe(true);
}

function serverConfig(): ServiceConfigForm {
  return {
    model_path: "model.json",
    device: "127.0.0.1:9000",
    stimulus: {
      default_kind: "beep",
      intensity: 35,
      escalation_enabled: true,
      quiet_threshold_dbfs: -42.5,
      quiet_kind: "vibrate",
      loud_kind: "zap",
    },
    vote_k: 6,
    chunk_threshold: 0.4,
    refractory_ms: 20000,
    log_dir: "logs",
    listen_addr: "127.0.0.1:8800",
    seed: 3,
  };
}

it("config form round-trips every stimulus plan field", async () => {
  // mocked service: stores the last PUT body and serves it back on GET
  let stored = serverConfig();
  const fetch: FetchLike = async (url, init) => {
    if (init?.method === "PUT") stored = JSON.parse(init.body!);
    return { ok: true, status: 200, json: async () => stored };
  };

  const loaded = await fetchConfig("http://svc", fetch);
  const result = await submitConfig("http://svc", loaded, fetch);
  const roundTripped = await fetchConfig("http://svc", fetch);

  const fields: (keyof ServiceConfigForm["stimulus"])[] = [
    "default_kind", "intensity", "escalation_enabled",
    "quiet_threshold_dbfs", "quiet_kind", "loud_kind",
  ];
  const allEqual = fields.every(
    (f) => String(roundTripped.stimulus[f]) === String(serverConfig().stimulus[f]),
  );
  report(result.ok && allEqual, "config form round-trip",
    `${fields.length} stimulus fields preserved`);
});

it("live feed holds exactly the last 300 under 1000 streamed events", () => {
  class FakeSocket implements SocketLike {
    onopen: ((ev?: unknown) => void) | null = null;
    onclose: ((ev?: unknown) => void) | null = null;
    onerror: ((ev?: unknown) => void) | null = null;
    onmessage: ((ev: { data: string }) => void) | null = null;
    close(): void {}
  }
  const sockets: FakeSocket[] = [];
  const state = initialState();
  connectStream(
    "http://svc",
    {
      onEvent: (e: EventRecord) => pushEvent(state, e),
      onConnected: () => undefined,
      onReconnecting: () => undefined,
    },
    { makeSocket: () => { const s = new FakeSocket(); sockets.push(s); return s; } },
  );
  const sock = sockets[0]!;
  sock.onopen?.();
  for (let i = 0; i < 1000; i++) {
    sock.onmessage?.({
      data: JSON.stringify({ ts_ms: (i + 1) * 1000, session_id: "s", kind: "decision", seq_no: i }),
    });
  }
  const ok =
    state.liveFeed.length === LIVE_FEED_CAPACITY &&
    state.streamed === 1000 &&
    state.liveFeed[0]?.seq_no === 700 &&
    state.liveFeed[299]?.seq_no === 999;
  report(ok, "live feed ring bound",
    `${state.streamed} streamed, feed [${state.liveFeed[0]?.seq_no}..${state.liveFeed[299]?.seq_no}]`);
});

it("history totals equal the client recount oracle", () => {
  // mocked session: a deterministic mix of every event kind
  const events: EventRecord[] = [];
  let ts = 0;
  for (let i = 0; i < 120; i++) {
    ts += 1000;
    events.push({ ts_ms: ts, session_id: "h", kind: "decision", seq_no: i });
    if (i % 17 === 0) events.push({ ts_ms: ts, session_id: "h", kind: "drop", seq_no: i });
    if (i % 30 === 29) {
      events.push({ ts_ms: ts, session_id: "h", kind: "trigger", vote_count: 8 });
      events.push({ ts_ms: ts, session_id: "h", kind: "nudge", stimulus: "zap", intensity: 60 });
      events.push({ ts_ms: ts, session_id: "h", kind: "ack", outcome: "ok" });
    }
  }
  const view = buildHistoryView("h", events);
  const count = (k: string) => events.filter((e) => e.kind === k).length;
  const ok =
    view.totals.decisions === count("decision") &&
    view.totals.triggers === count("trigger") &&
    view.totals.nudges === count("nudge") &&
    view.totals.acks === count("ack") &&
    view.totals.drops === count("drop") &&
    view.markers.length === count("trigger") + count("nudge");
  report(ok, "history recount oracle",
    `${events.length} events, totals ${JSON.stringify(view.totals)}`);
});
