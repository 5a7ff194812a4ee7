"""Privacy-preserving persistence: sessions and derived events.

Storage is newline-delimited JSON, append-only, one file per day inside a
per-session directory. The schema is scalar-only and closed: a fixed field
set, no arrays, no nested objects. That makes the no-audio-on-disk
guarantee a property of the write path, not a convention - there is simply
no field an audio buffer or feature matrix could go into.

A crash can truncate the final line; reads detect and skip it without
losing earlier records.
"""

import json
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import PersistedStateError, SchemaViolationError
from .nnet.rng import SplitMix64

EVENT_KINDS = {"decision", "trigger", "nudge", "ack", "calibration", "drop"}

REQUIRED_FIELDS = ("ts_ms", "session_id", "kind")
OPTIONAL_FIELDS = ("seq_no", "p_snore", "loudness_dbfs", "vote_count",
                   "stimulus", "intensity", "outcome")
ALLOWED_FIELDS = set(REQUIRED_FIELDS) | set(OPTIONAL_FIELDS)

_CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"


def new_session_id(ts_ms: int | None = None, seed: int | None = None) -> str:
    """ULID-style sortable id: 10 chars of millisecond time + 16 random chars."""
    if ts_ms is None:
        ts_ms = int(time.time() * 1000)
    rng = SplitMix64(seed if seed is not None else int.from_bytes(os.urandom(8), "big"))
    chars = []
    t = ts_ms
    for _ in range(10):
        chars.append(_CROCKFORD[t & 31])
        t >>= 5
    head = "".join(reversed(chars))
    tail = "".join(_CROCKFORD[rng.below(32)] for _ in range(16))
    return head + tail


def validate_event(event: dict) -> dict:
    """Enforce the scalar-only closed schema; returns the event unchanged."""
    if not isinstance(event, dict):
        raise SchemaViolationError("event must be a mapping")
    for name in REQUIRED_FIELDS:
        if name not in event:
            raise SchemaViolationError(f"missing required field {name!r}")
    for name, value in event.items():
        if name not in ALLOWED_FIELDS:
            raise SchemaViolationError(f"field {name!r} is not in the event schema")
        if not (value is None or isinstance(value, (int, float, str, bool))):
            raise SchemaViolationError(
                f"field {name!r} must be a scalar, got {type(value).__name__}"
            )
    if event["kind"] not in EVENT_KINDS:
        raise SchemaViolationError(f"unknown event kind {event['kind']!r}")
    return event


def _day(ts_ms: int) -> str:
    return datetime.fromtimestamp(ts_ms / 1000.0, tz=timezone.utc).strftime("%Y-%m-%d")


@dataclass
class EventLog:
    """Append-only event store rooted at a directory, one subdir per session."""

    root: Path

    def __post_init__(self):
        self.root = Path(self.root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._open_files: dict[Path, object] = {}

    def _session_dir(self, session_id: str) -> Path:
        d = self.root / session_id
        d.mkdir(parents=True, exist_ok=True)
        return d

    def _append_line(self, path: Path, record: dict) -> None:
        f = self._open_files.get(path)
        try:
            if f is None:
                f = open(path, "a")
                self._open_files[path] = f
            f.write(json.dumps(record, separators=(",", ":")) + "\n")
            f.flush()
            os.fsync(f.fileno())
        except OSError as e:
            raise PersistedStateError(f"cannot append to {path}: {e}") from e

    def open_session(self, session_id: str, started_ms: int, config: dict) -> None:
        self._append_line(
            self._session_dir(session_id) / "session.jsonl",
            {"record": "start", "session_id": session_id,
             "started_ms": started_ms, "config": config},
        )

    def close_session(self, session_id: str, ended_ms: int, summary: dict | None = None) -> None:
        self._append_line(
            self._session_dir(session_id) / "session.jsonl",
            {"record": "end", "session_id": session_id,
             "ended_ms": ended_ms, "summary": summary or {}},
        )

    def append_event(self, event: dict) -> None:
        validate_event(event)
        path = self._session_dir(event["session_id"]) / f"{_day(event['ts_ms'])}.jsonl"
        self._append_line(path, event)

    def sessions(self) -> list[dict]:
        """All session records (start merged with end when present), sorted by id."""
        out = []
        for d in sorted(p for p in self.root.iterdir() if p.is_dir()):
            meta = {}
            for rec in _read_jsonl(d / "session.jsonl"):
                if rec.get("record") == "start":
                    meta.update(session_id=rec["session_id"],
                                started_ms=rec["started_ms"], config=rec["config"])
                elif rec.get("record") == "end":
                    meta.update(ended_ms=rec["ended_ms"], summary=rec.get("summary", {}))
            if meta:
                out.append(meta)
        return out

    def read_events(self, session_id: str) -> list[dict]:
        d = self.root / session_id
        if not d.is_dir():
            return []
        events = []
        for path in sorted(d.glob("*.jsonl")):
            if path.name == "session.jsonl":
                continue
            events.extend(_read_jsonl(path))
        events.sort(key=lambda e: (e["ts_ms"], e.get("seq_no", -1)))
        return events

    def query_events(self, session_id: str, kind: str | None = None,
                     from_ms: int | None = None, to_ms: int | None = None) -> list[dict]:
        out = []
        for e in self.read_events(session_id):
            if kind is not None and e["kind"] != kind:
                continue
            if from_ms is not None and e["ts_ms"] < from_ms:
                continue
            if to_ms is not None and e["ts_ms"] > to_ms:
                continue
            out.append(e)
        return out

    def close(self) -> None:
        for f in self._open_files.values():
            f.close()
        self._open_files.clear()


def _read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        return []
    records = []
    with open(path, "rb") as f:
        data = f.read()
    for i, line in enumerate(data.split(b"\n")):
        if not line:
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError:
            # a torn final line from a crash is skipped; anything earlier is corruption
            if i < data.count(b"\n"):
                raise PersistedStateError(f"corrupt record mid-file in {path}")
    return records
