from .config import ServiceConfig
from .pipeline import (
    LiveSession,
    PipelineCore,
    PushSource,
    SessionStatus,
    model_classifier,
    run_calibration,
    run_replay,
    run_replay_wav,
)

__all__ = [
    "ServiceConfig",
    "LiveSession",
    "PipelineCore",
    "PushSource",
    "SessionStatus",
    "model_classifier",
    "run_calibration",
    "run_replay",
    "run_replay_wav",
]
