"""Wire protocol for the wrist device (stand-in for the real BLE link).

Big-endian fixed layouts, one byte of opcode then opcode-specific payload:

  0x01 NUDGE           kind(1B: 0=Beep,1=Vibrate,2=Zap) intensity(1B 0-100) seq(1B)
  0x02 SUBSCRIBE_ACCEL (no payload)
  0x81 ACK             status(1B: 0=ok) seq(1B)
  0x82 ACCEL           x,y,z int16 milli-g, timestamp_ms uint32
  0x83 ERROR           reason(1B: 1=malformed, 2=busy, 3=unsupported)

On a stream the frames are delimited by a single length byte counting the
opcode plus payload.
"""

import struct
from dataclasses import dataclass
from enum import IntEnum

from ..errors import MalformedFrameError

OP_NUDGE = 0x01
OP_SUBSCRIBE_ACCEL = 0x02
OP_ACK = 0x81
OP_ACCEL = 0x82
OP_ERROR = 0x83

REASON_MALFORMED = 1
REASON_BUSY = 2
REASON_UNSUPPORTED = 3


class StimulusKind(IntEnum):
    BEEP = 0
    VIBRATE = 1
    ZAP = 2


@dataclass(frozen=True)
class Nudge:
    kind: StimulusKind
    intensity: int  # clamped to [0, 100] at encode time
    seq: int = 0


@dataclass(frozen=True)
class SubscribeAccel:
    pass


@dataclass(frozen=True)
class Ack:
    status: int = 0
    seq: int = 0

    @property
    def ok(self) -> bool:
        return self.status == 0


@dataclass(frozen=True)
class Accel:
    x: int
    y: int
    z: int
    timestamp_ms: int


@dataclass(frozen=True)
class DeviceError:
    reason: int


# opcode -> (frame length including opcode, type)
FRAME_LAYOUT = {
    OP_NUDGE: (4, Nudge),
    OP_SUBSCRIBE_ACCEL: (1, SubscribeAccel),
    OP_ACK: (3, Ack),
    OP_ACCEL: (11, Accel),
    OP_ERROR: (2, DeviceError),
}


def encode_frame(frame) -> bytes:
    """Frame body bytes (no length prefix)."""
    if isinstance(frame, Nudge):
        intensity = min(100, max(0, int(frame.intensity)))
        return bytes([OP_NUDGE, int(frame.kind), intensity, frame.seq & 0xFF])
    if isinstance(frame, SubscribeAccel):
        return bytes([OP_SUBSCRIBE_ACCEL])
    if isinstance(frame, Ack):
        return bytes([OP_ACK, frame.status & 0xFF, frame.seq & 0xFF])
    if isinstance(frame, Accel):
        return bytes([OP_ACCEL]) + struct.pack(
            ">hhhI", frame.x, frame.y, frame.z, frame.timestamp_ms
        )
    if isinstance(frame, DeviceError):
        return bytes([OP_ERROR, frame.reason & 0xFF])
    raise TypeError(f"not a frame: {frame!r}")


def decode_frame(data: bytes):
    """Decode one frame body; raises MalformedFrameError with the bad offset."""
    if not data:
        raise MalformedFrameError("empty frame", offset=0)
    opcode = data[0]
    layout = FRAME_LAYOUT.get(opcode)
    if layout is None:
        raise MalformedFrameError(f"unknown opcode 0x{opcode:02x}", offset=0)
    length, _ = layout
    if len(data) != length:
        raise MalformedFrameError(
            f"opcode 0x{opcode:02x} needs {length} bytes, got {len(data)}",
            offset=min(len(data), length),
        )
    if opcode == OP_NUDGE:
        kind, intensity, seq = data[1], data[2], data[3]
        if kind > 2:
            raise MalformedFrameError(f"bad stimulus kind {kind}", offset=1)
        if intensity > 100:
            raise MalformedFrameError(f"intensity {intensity} > 100", offset=2)
        return Nudge(StimulusKind(kind), intensity, seq)
    if opcode == OP_SUBSCRIBE_ACCEL:
        return SubscribeAccel()
    if opcode == OP_ACK:
        return Ack(status=data[1], seq=data[2])
    if opcode == OP_ACCEL:
        x, y, z, ts = struct.unpack(">hhhI", data[1:])
        return Accel(x, y, z, ts)
    return DeviceError(reason=data[1])


def write_frame(sock_file, frame) -> bytes:
    """Length-prefix and write a frame to a binary stream; returns the body."""
    body = encode_frame(frame)
    sock_file.write(bytes([len(body)]) + body)
    sock_file.flush()
    return body


def read_frame_bytes(sock_file) -> bytes | None:
    """Read one length-prefixed frame body; None on clean EOF."""
    prefix = sock_file.read(1)
    if not prefix:
        return None
    length = prefix[0]
    body = sock_file.read(length)
    if len(body) != length:
        return None
    return body
