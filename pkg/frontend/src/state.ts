/** Client-side state: connection phase, status mirror, bounded live feed.
 *
 * All counters rendered from this state are pure functions of the events
 * pushed into it, so every view is snapshot-testable without a DOM.
 */

import { EventRecord, IDLE_STATUS, SessionStatus } from "./types.js";

export type ConnectionState = "connected" | "reconnecting";

export const LIVE_FEED_CAPACITY = 300;

export interface UiState {
  connection: ConnectionState;
  status: SessionStatus;
  /** Last LIVE_FEED_CAPACITY events in arrival order (oldest first). */
  liveFeed: EventRecord[];
  /** Total events ever received on the stream, including evicted ones. */
  streamed: number;
}

export function initialState(): UiState {
  return {
    connection: "reconnecting",
    status: { ...IDLE_STATUS },
    liveFeed: [],
    streamed: 0,
  };
}

/** Append one streamed event, evicting the oldest past the ring bound. */
export function pushEvent(state: UiState, event: EventRecord): void {
  state.liveFeed.push(event);
  state.streamed += 1;
  if (state.liveFeed.length > LIVE_FEED_CAPACITY) {
    state.liveFeed.splice(0, state.liveFeed.length - LIVE_FEED_CAPACITY);
  }
}

export function setConnection(state: UiState, connection: ConnectionState): void {
  state.connection = connection;
}

export function setStatus(state: UiState, status: SessionStatus): void {
  state.status = status;
}

/** Snore votes in the window currently being collected (for the vote meter). */
export function currentVoteCount(state: UiState): number {
  return state.status.current_window_votes;
}
