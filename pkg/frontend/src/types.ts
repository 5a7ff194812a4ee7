/** Wire-level shapes shared with the service: event records, config, status. */

export type StimulusKindName = "beep" | "vibrate" | "zap";

export const STIMULUS_KINDS: readonly StimulusKindName[] = ["beep", "vibrate", "zap"];

export type EventKind =
  | "decision"
  | "trigger"
  | "nudge"
  | "ack"
  | "calibration"
  | "drop";

/** One record from the event log / WS stream; scalar fields only. */
export interface EventRecord {
  ts_ms: number;
  session_id: string;
  kind: EventKind;
  seq_no?: number;
  p_snore?: number;
  loudness_dbfs?: number;
  vote_count?: number;
  stimulus?: StimulusKindName;
  intensity?: number;
  outcome?: string;
}

export interface StimulusPlanForm {
  default_kind: StimulusKindName;
  intensity: number;
  escalation_enabled: boolean;
  quiet_threshold_dbfs: number;
  quiet_kind: StimulusKindName;
  loud_kind: StimulusKindName;
}

/** Mirrors the service's config document field for field. */
export interface ServiceConfigForm {
  model_path: string;
  device: string | null;
  stimulus: StimulusPlanForm;
  vote_k: number;
  chunk_threshold: number;
  refractory_ms: number;
  log_dir: string;
  listen_addr: string;
  seed: number;
}

export interface SessionStatus {
  phase: string;
  chunks_seen: number;
  windows_voted: number;
  nudges_sent: number;
  drops: number;
  current_window_votes: number;
  device: string;
}

export interface SessionRecord {
  session_id: string;
  started_ms?: number;
  ended_ms?: number;
  summary?: {
    chunks_seen?: number;
    windows_voted?: number;
    nudges_sent?: number;
    drops?: number;
  };
}

export const IDLE_STATUS: SessionStatus = {
  phase: "idle",
  chunks_seen: 0,
  windows_voted: 0,
  nudges_sent: 0,
  drops: 0,
  current_window_votes: 0,
  device: "disconnected",
};
