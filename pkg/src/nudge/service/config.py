"""Service configuration: validation and JSON file loading.

The config file mirrors these field names exactly; `device: null` means
dry-run (no transport is opened and no frames are ever written).
"""

import json
from dataclasses import asdict, dataclass, field

from ..actuator.policy import StimulusPlan
from ..actuator.protocol import StimulusKind

KIND_NAMES = {"beep": StimulusKind.BEEP, "vibrate": StimulusKind.VIBRATE,
              "zap": StimulusKind.ZAP}
KIND_LABELS = {v: k for k, v in KIND_NAMES.items()}


@dataclass
class ServiceConfig:
    model_path: str = ""
    device: str | None = None
    stimulus: StimulusPlan = field(default_factory=StimulusPlan)
    vote_k: int = 7
    chunk_threshold: float = 0.5
    refractory_ms: int = 30000
    log_dir: str = "logs"
    listen_addr: str = "127.0.0.1:8800"
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.vote_k <= 10:
            raise ValueError("vote_k must be in 1..10")
        if not 0.0 < self.chunk_threshold < 1.0:
            raise ValueError("chunk_threshold must be in (0, 1)")
        if self.refractory_ms < 0:
            raise ValueError("refractory_ms must be >= 0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stimulus"] = {
            "default_kind": KIND_LABELS[self.stimulus.default_kind],
            "intensity": self.stimulus.intensity,
            "escalation_enabled": self.stimulus.escalation_enabled,
            "quiet_threshold_dbfs": self.stimulus.quiet_threshold_dbfs,
            "quiet_kind": KIND_LABELS[self.stimulus.quiet_kind],
            "loud_kind": KIND_LABELS[self.stimulus.loud_kind],
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ServiceConfig":
        d = dict(d)
        stim = d.pop("stimulus", {})
        if isinstance(stim, dict):
            stim = dict(stim)
            for key in ("default_kind", "quiet_kind", "loud_kind"):
                if key in stim and isinstance(stim[key], str):
                    name = stim[key].lower()
                    if name not in KIND_NAMES:
                        raise ValueError(f"unknown stimulus kind {stim[key]!r}")
                    stim[key] = KIND_NAMES[name]
            stim = StimulusPlan(**stim)
        return cls(stimulus=stim, **d)

    @classmethod
    def from_file(cls, path) -> "ServiceConfig":
        with open(path) as f:
            return cls.from_dict(json.load(f))
