/** DOM wiring: renders UiState into the page and binds the controls.
 *
 * All logic lives in the framework-free modules (state, stream, configForm,
 * history); this file only moves data between them and the document. Events
 * are rendered as scalar rows and meters — never as audio or waveforms.
 */

import { fetchConfig, submitConfig } from "./configForm.js";
import { buildHistoryView, fetchSessionHistory, fetchSessions } from "./history.js";
import { initialState, pushEvent, setConnection, setStatus, UiState } from "./state.js";
import { connectStream } from "./stream.js";
import { EventRecord, ServiceConfigForm, SessionStatus } from "./types.js";

const serviceAddr = window.location.origin;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function describeEvent(e: EventRecord): string {
  switch (e.kind) {
    case "decision":
      return `decision #${e.seq_no} p=${e.p_snore?.toFixed(3)} ${e.loudness_dbfs?.toFixed(1)} dBFS`;
    case "trigger":
      return `trigger at ${e.ts_ms} ms (${e.vote_count}/10 votes)`;
    case "nudge":
      return `nudge ${e.stimulus} @ ${e.intensity}`;
    case "ack":
      return `device ack: ${e.outcome}`;
    case "calibration":
      return `calibration -> intensity ${e.intensity} (${e.outcome})`;
    case "drop":
      return `chunk #${e.seq_no} dropped (backpressure)`;
  }
}

function renderFeed(state: UiState): void {
  const list = el<HTMLUListElement>("live-feed");
  list.replaceChildren(
    ...state.liveFeed.map((e) => {
      const li = document.createElement("li");
      li.className = `event event-${e.kind}`;
      li.textContent = describeEvent(e);
      return li;
    }),
  );
  el("connection").textContent = state.connection;
  const s = state.status;
  el("status-line").textContent =
    `${s.phase} · chunks ${s.chunks_seen} · windows ${s.windows_voted} · ` +
    `nudges ${s.nudges_sent} · drops ${s.drops} · device ${s.device}`;
  const meter = el<HTMLProgressElement & HTMLElement>("vote-meter") as unknown as HTMLProgressElement;
  meter.value = s.current_window_votes;
}

function readForm(): ServiceConfigForm {
  const base = JSON.parse(el<HTMLElement>("config-json").dataset.config ?? "{}");
  return {
    ...base,
    vote_k: Number(el<HTMLInputElement>("vote-k").value),
    stimulus: {
      ...base.stimulus,
      default_kind: el<HTMLSelectElement>("stimulus-kind").value,
      intensity: Number(el<HTMLInputElement>("intensity").value),
    },
  };
}

function showErrors(errors: Record<string, string | undefined>): void {
  el("form-errors").textContent = Object.entries(errors)
    .map(([field, msg]) => `${field}: ${msg}`)
    .join("; ");
}

async function refreshStatus(): Promise<SessionStatus> {
  const resp = await fetch(`${serviceAddr}/status`);
  return (await resp.json()) as SessionStatus;
}

export async function boot(): Promise<void> {
  const state = initialState();

  const config = await fetchConfig(serviceAddr, fetch.bind(window));
  el("config-json").dataset.config = JSON.stringify(config);
  el<HTMLInputElement>("vote-k").value = String(config.vote_k);
  el<HTMLSelectElement>("stimulus-kind").value = config.stimulus.default_kind;
  el<HTMLInputElement>("intensity").value = String(config.stimulus.intensity);

  connectStream(
    serviceAddr,
    {
      onEvent(event) {
        pushEvent(state, event);
        renderFeed(state);
      },
      onConnected() {
        setConnection(state, "connected");
        renderFeed(state);
      },
      onReconnecting() {
        setConnection(state, "reconnecting");
        renderFeed(state);
      },
    },
  );

  el("apply-config").addEventListener("click", async () => {
    const result = await submitConfig(serviceAddr, readForm(), fetch.bind(window));
    if (result.ok && result.config) {
      el("config-json").dataset.config = JSON.stringify(result.config);
      showErrors({});
    } else {
      showErrors(result.errors);
    }
  });

  el("start-session").addEventListener("click", async () => {
    await fetch(`${serviceAddr}/session/start`, { method: "POST" });
    setStatus(state, await refreshStatus());
    renderFeed(state);
  });

  el("stop-session").addEventListener("click", async () => {
    const sessions = await fetchSessions(serviceAddr, fetch.bind(window));
    const open = sessions.find((s) => s.ended_ms === undefined);
    if (open) {
      await fetch(`${serviceAddr}/session/${open.session_id}/stop`, { method: "POST" });
    }
    setStatus(state, await refreshStatus());
    renderFeed(state);
  });

  el("load-history").addEventListener("click", async () => {
    const sessions = await fetchSessions(serviceAddr, fetch.bind(window));
    const target = el<HTMLUListElement>("history");
    target.replaceChildren(
      ...(await Promise.all(
        sessions.map((s) => fetchSessionHistory(serviceAddr, s.session_id, fetch.bind(window))),
      )).map((view) => {
        const li = document.createElement("li");
        const t = view.totals;
        li.textContent = view.empty
          ? `${view.session_id}: no events`
          : `${view.session_id}: ${t.decisions} decisions, ${t.triggers} triggers, ` +
            `${t.nudges} nudges, ${t.drops} drops`;
        return li;
      }),
    );
  });

  setInterval(async () => {
    setStatus(state, await refreshStatus());
    renderFeed(state);
  }, 1000);
}

export { buildHistoryView };

if (typeof document !== "undefined" && document.getElementById("live-feed")) {
  void boot();
}
