"""Session engine: wires capture -> dsp -> detector -> actuator -> store.

Two entry points share the same core:

* `run_replay` processes a finite sample stream synchronously under a
  simulated clock (1 chunk = 1000 ms), so a given (input, config, seed)
  always produces a byte-identical event log.
* `LiveSession` runs the same core behind a three-stage thread pipeline
  with a bounded capture queue (2 chunks, drop-oldest with a logged
  `drop` event).

Audio never outlives classification: the core extracts features, decides,
and lets the chunk go out of scope; only scalar events are persisted.
"""

import queue
import threading
import time
from dataclasses import dataclass

from .. import corpus, dsp
from ..actuator.policy import CalibrationState, calibrate_update, select_stimulus
from ..actuator.transport import DeviceClient
from ..detector import ChunkDecision, CycleConfig, CycleState, classify_chunk
from ..errors import NudgeError, StartupError
from ..nnet import load_model
from ..store import EventLog, new_session_id
from .config import KIND_LABELS, ServiceConfig


@dataclass
class SessionStatus:
    phase: str = "idle"
    chunks_seen: int = 0
    windows_voted: int = 0
    nudges_sent: int = 0
    drops: int = 0
    current_window_votes: int = 0
    device: str = "disconnected"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


class PipelineCore:
    """Chunk-at-a-time pipeline shared by replay and live modes."""

    def __init__(self, cfg: ServiceConfig, classifier, log: EventLog,
                 session_id: str, device: DeviceClient | None = None,
                 on_event=None):
        self.cfg = cfg
        self.classifier = classifier
        self.log = log
        self.session_id = session_id
        self.device = device
        self.on_event = on_event
        self.cycle = CycleState(CycleConfig(cfg.vote_k, cfg.refractory_ms))
        self.status = SessionStatus(
            phase="running",
            device="connected" if device else "disconnected",
        )
        self.last_nudge_latency_ms: float | None = None

    def _emit(self, event: dict) -> None:
        self.log.append_event(event)
        if self.on_event:
            self.on_event(event)

    def handle_chunk(self, chunk: dsp.AudioChunk, now_ms: int) -> list[dict]:
        """Classify one chunk, advance the vote cycle, actuate on a trigger."""
        decision: ChunkDecision = self.classifier(chunk)
        done_wall = time.monotonic()
        events = [{
            "ts_ms": now_ms, "session_id": self.session_id, "kind": "decision",
            "seq_no": decision.seq_no, "p_snore": round(decision.p_snore, 6),
            "loudness_dbfs": round(decision.loudness_dbfs, 3),
        }]
        self.status.chunks_seen += 1
        trigger = self.cycle.step(decision, now_ms)
        self.status.current_window_votes = sum(d.is_snore for d in self.cycle.collected)
        self.status.phase = self.cycle.phase.value
        if not self.cycle.collected:
            self.status.windows_voted += 1
        if trigger is not None:
            events.append({
                "ts_ms": now_ms, "session_id": self.session_id, "kind": "trigger",
                "seq_no": trigger.seq_no, "vote_count": trigger.vote_count,
                "loudness_dbfs": round(trigger.max_loudness_dbfs, 3),
            })
            events.extend(self._actuate(trigger, now_ms, done_wall))
        for e in events:
            self._emit(e)
        return events

    def _actuate(self, trigger, now_ms: int, vote_done_wall: float) -> list[dict]:
        kind, intensity = select_stimulus(self.cfg.stimulus, trigger.max_loudness_dbfs)
        events = [{
            "ts_ms": now_ms, "session_id": self.session_id, "kind": "nudge",
            "stimulus": KIND_LABELS[kind], "intensity": intensity,
        }]
        if self.device is not None:
            try:
                ack = self.device.nudge(kind, intensity)
                self.last_nudge_latency_ms = (time.monotonic() - vote_done_wall) * 1000.0
                events.append({
                    "ts_ms": now_ms, "session_id": self.session_id, "kind": "ack",
                    "outcome": "ok" if ack.ok else f"status_{ack.status}",
                })
            except NudgeError as e:
                events.append({
                    "ts_ms": now_ms, "session_id": self.session_id, "kind": "ack",
                    "outcome": f"error:{type(e).__name__}",
                })
        self.status.nudges_sent += 1
        return events

    def summary(self) -> dict:
        s = self.status
        return {"chunks_seen": s.chunks_seen, "windows_voted": s.windows_voted,
                "nudges_sent": s.nudges_sent, "drops": s.drops}


def model_classifier(model, threshold: float = 0.5):
    return lambda chunk: classify_chunk(model, chunk, threshold)


def run_replay(samples, cfg: ServiceConfig, log: EventLog, classifier=None,
               device: DeviceClient | None = None):
    """Replay a finite sample stream deterministically; returns (session_id, events)."""
    if classifier is None:
        try:
            model = load_model(cfg.model_path)
        except OSError as e:
            raise StartupError(f"cannot load model {cfg.model_path!r}: {e}") from e
        classifier = model_classifier(model, cfg.chunk_threshold)
    session_id = new_session_id(ts_ms=0, seed=cfg.seed)
    log.open_session(session_id, started_ms=0, config=cfg.to_dict())
    core = PipelineCore(cfg, classifier, log, session_id, device)
    chunker = dsp.Chunker()
    events = []
    for chunk in chunker.feed(samples):
        # a chunk is complete at the end of its second of audio
        events.extend(core.handle_chunk(chunk, now_ms=(chunk.seq_no + 1) * 1000))
    log.close_session(session_id, ended_ms=core.status.chunks_seen * 1000,
                      summary=core.summary())
    return session_id, events, core


def run_replay_wav(wav_path, cfg: ServiceConfig, log: EventLog, classifier=None,
                   device: DeviceClient | None = None):
    return run_replay(corpus.load_wav(wav_path), cfg, log, classifier, device)


class PushSource:
    """Sample source fed by an external producer (microphone stand-in)."""

    def __init__(self):
        self._q = queue.Queue()
        self._closed = False

    def push(self, samples) -> None:
        self._q.put(samples)

    def close(self) -> None:
        self._q.put(None)

    def blocks(self):
        while True:
            block = self._q.get()
            if block is None:
                return
            yield block


class LiveSession:
    """Three-stage live pipeline: capture, inference, actuation/persistence.

    The capture->inference queue holds at most 2 chunks; when full the
    oldest chunk is dropped and a `drop` event logged, so a stalled
    classifier can never grow memory without bound.
    """

    CAPTURE_QUEUE = 2

    def __init__(self, cfg: ServiceConfig, classifier, log: EventLog,
                 source: PushSource, device: DeviceClient | None = None,
                 on_event=None, clock=None):
        self.session_id = new_session_id()
        self._start_wall = time.time()
        self.clock = clock or (lambda: int((time.time() - self._start_wall) * 1000))
        log.open_session(self.session_id, started_ms=int(self._start_wall * 1000),
                         config=cfg.to_dict())
        self.core = PipelineCore(cfg, classifier, log, self.session_id, device, on_event)
        self.log = log
        self.source = source
        self._chunks = []
        self._chunk_lock = threading.Condition()
        self._stopping = False
        self._capture = threading.Thread(target=self._capture_loop, daemon=True)
        self._infer = threading.Thread(target=self._infer_loop, daemon=True)
        self._capture.start()
        self._infer.start()

    def _capture_loop(self):
        chunker = dsp.Chunker()
        for block in self.source.blocks():
            if self._stopping:
                break
            for chunk in chunker.feed(block):
                with self._chunk_lock:
                    if len(self._chunks) >= self.CAPTURE_QUEUE:
                        dropped = self._chunks.pop(0)
                        self.core.status.drops += 1
                        self.core._emit({
                            "ts_ms": self.clock(), "session_id": self.session_id,
                            "kind": "drop", "seq_no": dropped.seq_no,
                        })
                    self._chunks.append(chunk)
                    self._chunk_lock.notify()
        with self._chunk_lock:
            self._stopping = True
            self._chunk_lock.notify()

    def _infer_loop(self):
        while True:
            with self._chunk_lock:
                while not self._chunks and not self._stopping:
                    self._chunk_lock.wait()
                if not self._chunks and self._stopping:
                    return
                chunk = self._chunks.pop(0)
            self.core.handle_chunk(chunk, self.clock())

    def stop(self) -> dict:
        """Drain in flight work, close the session, return the summary."""
        self._stopping = True
        self.source.close()
        self._capture.join(timeout=5)
        self._infer.join(timeout=5)
        summary = self.core.summary()
        self.log.close_session(self.session_id, ended_ms=self.clock(), summary=summary)
        self.core.status.phase = "idle"
        return summary


def run_calibration(client: DeviceClient, cal: CalibrationState, kind,
                    cycles: int, movement_timeout_s: float = 0.5):
    """Drive the MNS loop against a live device: nudge, watch for movement,
    step the intensity. Returns (final state, per-cycle history)."""
    client.subscribe_accel()
    history = []
    for _ in range(cycles):
        # stale burst frames from the previous cycle must not count as a
        # response to this nudge
        time.sleep(0.05)
        while not client.telemetry.empty():
            client.telemetry.get_nowait()
        client.nudge(kind, cal.current_intensity)
        moved = False
        try:
            client.telemetry.get(timeout=movement_timeout_s)
            moved = True
        except queue.Empty:
            pass
        # movement implies posture change; snore cessation follows in the sim
        new_cal = calibrate_update(cal, moved=moved, snore_ceased=moved)
        history.append((cal.current_intensity, moved, new_cal.current_intensity))
        cal = new_cal
    return cal, history
