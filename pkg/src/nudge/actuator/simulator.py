"""Device simulator: serves the wire protocol over a local TCP socket.

Stands in for the real wrist hardware. A scenario controls ack delays,
dropped responses, and the sleeper model (whether a nudge of a given kind
and intensity makes the sleeper move). Movement emits a short burst of
accelerometer telemetry to subscribed clients. Nudge commands carry a
sequence byte; a repeated sequence number is re-acked without re-running
the sleeper, so a retried command never double-nudges.
"""

import json
import socket
import socketserver
import threading
import time

from ..errors import MalformedFrameError
from ..nnet.rng import SplitMix64
from .protocol import (
    FRAME_LAYOUT,
    REASON_MALFORMED,
    REASON_UNSUPPORTED,
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

KIND_FACTOR = {StimulusKind.BEEP: 0.3, StimulusKind.VIBRATE: 0.6, StimulusKind.ZAP: 1.0}


class SleeperModel:
    """Movement response to a stimulus; monotone in intensity by construction.

    kinds:
      threshold     - moves iff intensity >= threshold (any stimulus kind)
      probabilistic - P(move) = kind_factor * intensity / 100
      deaf          - never moves
    """

    def __init__(self, spec: dict | None = None):
        spec = spec or {"type": "threshold", "threshold": 70}
        self.type = spec.get("type", "threshold")
        self.threshold = spec.get("threshold", 70)
        self.rng = SplitMix64(spec.get("seed", 0))

    def responds(self, kind: StimulusKind, intensity: int) -> bool:
        if self.type == "deaf":
            return False
        if self.type == "threshold":
            return intensity >= self.threshold
        if self.type == "probabilistic":
            return self.rng.uniform() < KIND_FACTOR[StimulusKind(kind)] * intensity / 100.0
        raise ValueError(f"unknown sleeper type {self.type!r}")


class Scenario:
    def __init__(self, spec: dict | None = None):
        spec = spec or {}
        self.ack_delay_ms = spec.get("ack_delay_ms", 0)
        self.drop_responses = set(spec.get("drop_responses", []))
        self.move_delay_ms = spec.get("move_delay_ms", 50)
        self.sleeper = SleeperModel(spec.get("sleeper"))

    @classmethod
    def from_file(cls, path):
        with open(path) as f:
            return cls(json.load(f))


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        server = self.server
        subscribed = False
        request_idx = 0
        seen_seqs = {}
        start = time.monotonic()
        lock = threading.Lock()  # serialises writes: telemetry vs responses

        def send(frame):
            try:
                with lock:
                    write_frame(self.wfile, frame)
            except (BrokenPipeError, ConnectionResetError, ValueError):
                pass

        while True:
            try:
                body = read_frame_bytes(self.rfile)
            except (ConnectionResetError, OSError):
                return
            if body is None:
                return
            try:
                frame = decode_frame(body)
            except MalformedFrameError:
                reason = (REASON_UNSUPPORTED
                          if body and body[0] not in FRAME_LAYOUT
                          else REASON_MALFORMED)
                send(DeviceError(reason))
                request_idx += 1
                continue

            if isinstance(frame, SubscribeAccel):
                subscribed = True
                send(Ack(0, 0))
            elif isinstance(frame, Nudge):
                duplicate = seen_seqs.get(frame.seq) == (frame.kind, frame.intensity)
                if not duplicate:
                    seen_seqs[frame.seq] = (frame.kind, frame.intensity)
                    moved = server.scenario.sleeper.responds(frame.kind, frame.intensity)
                    server.log.append(("nudge", frame.kind, frame.intensity, moved))
                    if moved and subscribed:
                        delay = server.scenario.move_delay_ms / 1000.0
                        ts = int((time.monotonic() - start) * 1000) + server.scenario.move_delay_ms
                        t = threading.Timer(delay, self._emit_movement, (send, ts))
                        t.daemon = True
                        t.start()
                if self.server.scenario.ack_delay_ms:
                    time.sleep(self.server.scenario.ack_delay_ms / 1000.0)
                if request_idx in server.scenario.drop_responses:
                    pass  # scripted fault: swallow the response
                else:
                    send(Ack(0, frame.seq))
            else:
                # device-to-host opcodes arriving inbound are not commands
                send(DeviceError(REASON_UNSUPPORTED))
            request_idx += 1

    def _emit_movement(self, send, ts_ms):
        # short burst of milli-g readings around 1 g on z
        for i in range(3):
            send(Accel(x=120 + 5 * i, y=-80, z=980, timestamp_ms=ts_ms + 20 * i))


class DeviceSimulator(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, addr=("127.0.0.1", 0), scenario: Scenario | None = None):
        super().__init__(addr, _Handler)
        self.scenario = scenario or Scenario()
        self.log = []
        self._thread = None

    @property
    def address(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"

    def start(self):
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self.shutdown()
        self.server_close()


def run_simulator(listen: str, scenario: Scenario | None = None) -> DeviceSimulator:
    host, _, port = listen.partition(":")
    sim = DeviceSimulator((host or "127.0.0.1", int(port or 0)), scenario)
    sim.start()
    return sim
