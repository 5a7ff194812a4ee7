/** Live event subscription over the service's /stream WebSocket.
 *
 * Reconnects with exponential backoff: 1 s base, doubling, capped at 30 s.
 * The socket constructor and timer are injectable so the policy is testable
 * without a network.
 */

import { EventRecord } from "./types.js";

export const BACKOFF_BASE_MS = 1000;
export const BACKOFF_CAP_MS = 30000;

/** Minimal WebSocket surface the client needs. */
export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  close(): void;
}

export interface StreamCallbacks {
  onEvent(event: EventRecord): void;
  onConnected(): void;
  onReconnecting(delayMs: number): void;
}

export interface StreamOptions {
  makeSocket?: (url: string) => SocketLike;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
}

export interface StreamHandle {
  close(): void;
}

export function backoffDelayMs(attempt: number): number {
  // attempt 0 -> 1 s, 1 -> 2 s, ... capped at 30 s
  return Math.min(BACKOFF_BASE_MS * 2 ** attempt, BACKOFF_CAP_MS);
}

export function streamUrl(serviceAddr: string): string {
  const base = serviceAddr.replace(/^http/, "ws").replace(/\/$/, "");
  return `${base}/stream`;
}

export function connectStream(
  serviceAddr: string,
  callbacks: StreamCallbacks,
  options: StreamOptions = {},
): StreamHandle {
  const makeSocket =
    options.makeSocket ?? ((url: string) => new WebSocket(url) as unknown as SocketLike);
  const setTimer = options.setTimer ?? ((fn: () => void, ms: number) => setTimeout(fn, ms));
  const clearTimer = options.clearTimer ?? ((h: unknown) => clearTimeout(h as number));

  let attempt = 0;
  let closed = false;
  let socket: SocketLike | null = null;
  let timer: unknown = null;

  function open(): void {
    if (closed) return;
    socket = makeSocket(streamUrl(serviceAddr));
    socket.onopen = () => {
      attempt = 0;
      callbacks.onConnected();
    };
    socket.onmessage = (ev) => {
      callbacks.onEvent(JSON.parse(ev.data) as EventRecord);
    };
    socket.onerror = null; // onclose always follows; avoid double-scheduling
    socket.onclose = () => {
      if (closed) return;
      const delay = backoffDelayMs(attempt);
      attempt += 1;
      callbacks.onReconnecting(delay);
      timer = setTimer(open, delay);
    };
  }

  open();
  return {
    close(): void {
      closed = true;
      if (timer !== null) clearTimer(timer);
      if (socket) {
        socket.onclose = null;
        socket.close();
      }
    },
  };
}
