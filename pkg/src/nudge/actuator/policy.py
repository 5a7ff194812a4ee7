"""Stimulus selection and minimum-necessary-stimulus calibration.

Escalation maps window loudness to the stimulus kind: quiet snores get the
gentle kind, loud snores the strong one. Calibration walks the intensity
down after a success (sleeper moved and snoring stopped) and up after a
failure, clamped to its bounds; under a deterministic sleeper this settles
into the one-step bracket around the true minimum.
"""

from dataclasses import dataclass
from enum import Enum

from .protocol import StimulusKind


@dataclass
class StimulusPlan:
    default_kind: StimulusKind = StimulusKind.VIBRATE
    intensity: int = 50
    escalation_enabled: bool = False
    quiet_threshold_dbfs: float = -30.0
    quiet_kind: StimulusKind = StimulusKind.VIBRATE
    loud_kind: StimulusKind = StimulusKind.ZAP

    def __post_init__(self):
        if not 0 <= self.intensity <= 100:
            raise ValueError("intensity must be in [0, 100]")
        if not -120.0 <= self.quiet_threshold_dbfs <= 0.0:
            raise ValueError("quiet_threshold_dbfs must be in [-120, 0]")


def select_stimulus(plan: StimulusPlan, loudness_dbfs: float):
    """(kind, intensity) for a trigger at the given loudness."""
    if not plan.escalation_enabled:
        return plan.default_kind, plan.intensity
    if loudness_dbfs < plan.quiet_threshold_dbfs:
        return plan.quiet_kind, plan.intensity
    return plan.loud_kind, plan.intensity


class Outcome(Enum):
    NONE = "none"
    SUCCESS = "success"
    FAILURE = "failure"


@dataclass
class CalibrationState:
    current_intensity: int = 50
    step: int = 10
    min_i: int = 10
    max_i: int = 100
    last_outcome: Outcome = Outcome.NONE

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if not self.min_i <= self.current_intensity <= self.max_i:
            raise ValueError("current_intensity outside [min_i, max_i]")


def calibrate_update(cal: CalibrationState, moved: bool, snore_ceased: bool) -> CalibrationState:
    """Post-nudge update: success steps intensity down, failure steps it up."""
    success = moved and snore_ceased
    if success:
        intensity = max(cal.min_i, cal.current_intensity - cal.step)
        outcome = Outcome.SUCCESS
    else:
        intensity = min(cal.max_i, cal.current_intensity + cal.step)
        outcome = Outcome.FAILURE
    return CalibrationState(
        current_intensity=intensity,
        step=cal.step,
        min_i=cal.min_i,
        max_i=cal.max_i,
        last_outcome=outcome,
    )
