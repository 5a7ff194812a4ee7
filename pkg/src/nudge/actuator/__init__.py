from .policy import CalibrationState, Outcome, StimulusPlan, calibrate_update, select_stimulus
from .protocol import (
    Accel,
    Ack,
    DeviceError,
    Nudge,
    StimulusKind,
    SubscribeAccel,
    decode_frame,
    encode_frame,
)
from .simulator import DeviceSimulator, Scenario, SleeperModel, run_simulator
from .transport import DeviceClient, device_transaction

__all__ = [
    "CalibrationState",
    "Outcome",
    "StimulusPlan",
    "calibrate_update",
    "select_stimulus",
    "Accel",
    "Ack",
    "DeviceError",
    "Nudge",
    "StimulusKind",
    "SubscribeAccel",
    "decode_frame",
    "encode_frame",
    "DeviceSimulator",
    "Scenario",
    "SleeperModel",
    "run_simulator",
    "DeviceClient",
    "device_transaction",
]
