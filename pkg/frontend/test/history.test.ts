import { describe, expect, it } from "vitest";

import { FetchLike } from "../src/configForm.js";
import { buildHistoryView, fetchSessionHistory, recountTotals } from "../src/history.js";
import { EventRecord } from "../src/types.js";

function sessionEvents(): EventRecord[] {
  const events: EventRecord[] = [];
  for (let i = 0; i < 60; i++) {
    events.push({ ts_ms: (i + 1) * 1000, session_id: "s", kind: "decision", seq_no: i, p_snore: i >= 20 ? 1 : 0 });
  }
  for (const ts of [30000, 60000]) {
    events.push({ ts_ms: ts, session_id: "s", kind: "trigger", vote_count: 10 });
    events.push({ ts_ms: ts, session_id: "s", kind: "nudge", stimulus: "vibrate", intensity: 50 });
    events.push({ ts_ms: ts, session_id: "s", kind: "ack", outcome: "ok" });
  }
  events.push({ ts_ms: 5000, session_id: "s", kind: "nudge", stimulus: "zap", intensity: 70 });
  return events;
}

describe("history timeline", () => {
  it("shows one marker per trigger and nudge, sorted by time", () => {
    const view = buildHistoryView("s", sessionEvents());
    expect(view.markers.filter((m) => m.kind === "nudge").length).toBe(3);
    expect(view.markers.filter((m) => m.kind === "trigger").length).toBe(2);
    const times = view.markers.map((m) => m.ts_ms);
    expect(times).toEqual([...times].sort((a, b) => a - b));
    expect(view.markers.find((m) => m.kind === "trigger")?.vote_count).toBe(10);
  });

  it("renders an empty session as an empty state, not an error", () => {
    const view = buildHistoryView("empty", []);
    expect(view.empty).toBe(true);
    expect(view.markers).toEqual([]);
    expect(view.totals).toEqual({ decisions: 0, triggers: 0, nudges: 0, acks: 0, drops: 0 });
  });

  it("displayed totals equal an independent recount of the fetched events", () => {
    const events = sessionEvents();
    const view = buildHistoryView("s", events);
    // independent recount: count each kind by brute-force filtering
    const oracle = {
      decisions: events.filter((e) => e.kind === "decision").length,
      triggers: events.filter((e) => e.kind === "trigger").length,
      nudges: events.filter((e) => e.kind === "nudge").length,
      acks: events.filter((e) => e.kind === "ack").length,
      drops: events.filter((e) => e.kind === "drop").length,
    };
    expect(view.totals).toEqual(oracle);
    expect(recountTotals(events)).toEqual(oracle);
  });

  it("fetches /events scoped to the session id", async () => {
    const calls: string[] = [];
    const fetch: FetchLike = async (url) => {
      calls.push(url);
      return { ok: true, status: 200, json: async () => sessionEvents() };
    };
    const view = await fetchSessionHistory("http://svc", "abc", fetch);
    expect(calls).toEqual(["http://svc/events?session_id=abc"]);
    expect(view.totals.nudges).toBe(3);
  });
});
