/** Session history: fetch persisted events and build a timeline whose
 * displayed totals are recounted from the event list itself, so the numbers
 * on screen can never drift from the data behind them.
 */

import { FetchLike } from "./configForm.js";
import { EventRecord, SessionRecord } from "./types.js";

export interface TimelineMarker {
  ts_ms: number;
  kind: "trigger" | "nudge";
  /** Snore votes in the triggering window, when the event carries one. */
  vote_count?: number;
  stimulus?: string;
  intensity?: number;
}

export interface HistoryTotals {
  decisions: number;
  triggers: number;
  nudges: number;
  acks: number;
  drops: number;
}

export interface HistoryView {
  session_id: string;
  empty: boolean;
  markers: TimelineMarker[];
  totals: HistoryTotals;
}

/** Independent recount over a fetched event list (the totals oracle). */
export function recountTotals(events: readonly EventRecord[]): HistoryTotals {
  const totals: HistoryTotals = { decisions: 0, triggers: 0, nudges: 0, acks: 0, drops: 0 };
  for (const e of events) {
    if (e.kind === "decision") totals.decisions += 1;
    else if (e.kind === "trigger") totals.triggers += 1;
    else if (e.kind === "nudge") totals.nudges += 1;
    else if (e.kind === "ack") totals.acks += 1;
    else if (e.kind === "drop") totals.drops += 1;
  }
  return totals;
}

export function buildHistoryView(sessionId: string, events: readonly EventRecord[]): HistoryView {
  const markers: TimelineMarker[] = [];
  for (const e of events) {
    if (e.kind === "trigger") {
      markers.push({ ts_ms: e.ts_ms, kind: "trigger", vote_count: e.vote_count });
    } else if (e.kind === "nudge") {
      markers.push({
        ts_ms: e.ts_ms,
        kind: "nudge",
        stimulus: e.stimulus,
        intensity: e.intensity,
      });
    }
  }
  markers.sort((a, b) => a.ts_ms - b.ts_ms);
  return {
    session_id: sessionId,
    empty: events.length === 0,
    markers,
    totals: recountTotals(events),
  };
}

export async function fetchSessions(
  serviceAddr: string,
  fetchFn: FetchLike,
): Promise<SessionRecord[]> {
  const resp = await fetchFn(`${serviceAddr}/sessions`);
  if (!resp.ok) throw new Error(`GET /sessions failed with ${resp.status}`);
  return (await resp.json()) as SessionRecord[];
}

export async function fetchSessionHistory(
  serviceAddr: string,
  sessionId: string,
  fetchFn: FetchLike,
): Promise<HistoryView> {
  const resp = await fetchFn(
    `${serviceAddr}/events?session_id=${encodeURIComponent(sessionId)}`,
  );
  if (!resp.ok) throw new Error(`GET /events failed with ${resp.status}`);
  const events = (await resp.json()) as EventRecord[];
  return buildHistoryView(sessionId, events);
}
