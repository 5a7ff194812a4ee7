"""Detection cycle: per-chunk classification, tumbling 10-chunk vote,
trigger emission with a refractory period.

The cycle is a deterministic state machine. Windows are tumbling: each
decision belongs to exactly one window, and after every 10th decision the
window votes and is discarded. A trigger puts the cycle into Refractory;
decisions keep flowing (and are logged upstream) but completed windows
cannot emit again until the refractory deadline passes.
"""

from dataclasses import dataclass, field
from enum import Enum

from . import dsp
from .errors import ContractViolationError, SequencingError
from .nnet import forward

WINDOW_SIZE = 10
DEFAULT_VOTE_K = 7
DEFAULT_REFRACTORY_MS = 30000
CHUNK_THRESHOLD = 0.5


@dataclass(frozen=True)
class ChunkDecision:
    seq_no: int
    p_snore: float
    is_snore: bool
    loudness_dbfs: float


@dataclass(frozen=True)
class TriggerEvent:
    seq_no: int           # last chunk of the triggering window
    vote_count: int
    max_loudness_dbfs: float
    ts_ms: int


class Phase(Enum):
    COLLECTING = "collecting"
    REFRACTORY = "refractory"


def classify_chunk(model, chunk: dsp.AudioChunk, threshold: float = CHUNK_THRESHOLD) -> ChunkDecision:
    """Run the model on one chunk; p_snore >= threshold counts as snore (ties -> snore)."""
    _, p_snore = forward(model, dsp.compute_mfcc(chunk))
    return ChunkDecision(
        seq_no=chunk.seq_no,
        p_snore=p_snore,
        is_snore=p_snore >= threshold,
        loudness_dbfs=dsp.compute_loudness(chunk),
    )


def vote(decisions, k: int = DEFAULT_VOTE_K) -> bool:
    """Trigger iff at least k of the 10 window decisions are snore."""
    decisions = list(decisions)
    if len(decisions) != WINDOW_SIZE:
        raise ContractViolationError(
            f"vote needs exactly {WINDOW_SIZE} decisions, got {len(decisions)}"
        )
    if not 1 <= k <= WINDOW_SIZE:
        raise ContractViolationError(f"vote threshold k={k} outside 1..{WINDOW_SIZE}")
    return sum(d.is_snore for d in decisions) >= k


@dataclass
class CycleConfig:
    vote_k: int = DEFAULT_VOTE_K
    refractory_ms: int = DEFAULT_REFRACTORY_MS

    def __post_init__(self):
        if not 1 <= self.vote_k <= WINDOW_SIZE:
            raise ValueError(f"vote_k must be in 1..{WINDOW_SIZE}")
        if self.refractory_ms < 0:
            raise ValueError("refractory_ms must be >= 0")


@dataclass
class CycleState:
    config: CycleConfig = field(default_factory=CycleConfig)
    phase: Phase = Phase.COLLECTING
    collected: list = field(default_factory=list)
    refractory_until: int = 0
    _expect_seq: int | None = None

    def step(self, decision: ChunkDecision, now_ms: int):
        """Feed one decision; returns the TriggerEvent if the window fired."""
        # gaps are legal (an overloaded pipeline drops chunks, with a logged
        # drop event); going backwards or repeating means a capture bug
        if self._expect_seq is not None and decision.seq_no < self._expect_seq:
            raise SequencingError(
                f"seq_no went backwards: expected >= {self._expect_seq}, "
                f"got {decision.seq_no}"
            )
        self._expect_seq = decision.seq_no + 1

        if self.phase is Phase.REFRACTORY and now_ms >= self.refractory_until:
            self.phase = Phase.COLLECTING

        self.collected.append(decision)
        if len(self.collected) < WINDOW_SIZE:
            return None

        window = self.collected
        self.collected = []
        vote_count = sum(d.is_snore for d in window)
        if vote_count >= self.config.vote_k and self.phase is Phase.COLLECTING:
            self.phase = Phase.REFRACTORY
            self.refractory_until = now_ms + self.config.refractory_ms
            return TriggerEvent(
                seq_no=decision.seq_no,
                vote_count=vote_count,
                max_loudness_dbfs=max(d.loudness_dbfs for d in window),
                ts_ms=now_ms,
            )
        return None


def step_cycle(state: CycleState, decision: ChunkDecision, now_ms: int):
    """Functional-style wrapper around CycleState.step."""
    return state, state.step(decision, now_ms)
