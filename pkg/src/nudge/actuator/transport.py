"""Client side of the device link.

A DeviceClient owns one TCP connection. A reader thread splits inbound
frames into command responses (Ack/Error) and telemetry (Accel); commands
are serialized, so at most one response is ever outstanding. On a response
timeout the command is retried exactly once with the same sequence byte
(the device dedupes), then the error is surfaced.
"""

import queue
import socket
import threading

from ..errors import DeviceRejectedError, DeviceUnreachableError
from .protocol import (
    Accel,
    Ack,
    DeviceError,
    Nudge,
    StimulusKind,
    SubscribeAccel,
    decode_frame,
    read_frame_bytes,
    write_frame,
)

DEFAULT_TIMEOUT_MS = 2000


class DeviceClient:
    def __init__(self, address: str, timeout_ms: int = DEFAULT_TIMEOUT_MS):
        host, _, port = address.partition(":")
        try:
            self._sock = socket.create_connection((host, int(port)), timeout=5.0)
        except OSError as e:
            raise DeviceUnreachableError(f"cannot connect to device at {address}: {e}") from e
        self._sock.settimeout(None)
        self._rfile = self._sock.makefile("rb")
        self._wfile = self._sock.makefile("wb")
        self.timeout_ms = timeout_ms
        self._responses = queue.Queue()
        self.telemetry = queue.Queue()
        self._cmd_lock = threading.Lock()
        self._seq = 0
        self.frames_sent = 0
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self):
        while True:
            try:
                body = read_frame_bytes(self._rfile)
            except (OSError, ValueError):
                break
            if body is None:
                break
            try:
                frame = decode_frame(body)
            except Exception:
                continue  # garbage from the wire; responses resync via timeout
            if isinstance(frame, Accel):
                self.telemetry.put(frame)
            else:
                self._responses.put(frame)

    def transaction(self, frame):
        """Send one command and wait for its Ack; one retry on timeout."""
        with self._cmd_lock:
            for attempt in range(2):
                write_frame(self._wfile, frame)
                self.frames_sent += 1
                try:
                    resp = self._responses.get(timeout=self.timeout_ms / 1000.0)
                except queue.Empty:
                    continue
                if isinstance(resp, DeviceError):
                    raise DeviceRejectedError(
                        f"device rejected command (reason {resp.reason})",
                        reason=resp.reason,
                    )
                return resp
            raise DeviceUnreachableError(
                f"no response within {self.timeout_ms} ms (after retry)"
            )

    def nudge(self, kind: StimulusKind, intensity: int) -> Ack:
        intensity = min(100, max(0, int(intensity)))
        seq = self._seq
        self._seq = (self._seq + 1) & 0xFF
        return self.transaction(Nudge(kind, intensity, seq))

    def subscribe_accel(self) -> Ack:
        return self.transaction(SubscribeAccel())

    def close(self):
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()


def device_transaction(transport: DeviceClient, frame):
    return transport.transaction(frame)
