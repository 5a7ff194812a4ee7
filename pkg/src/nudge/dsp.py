"""Signal-processing front end: chunking, loudness, MFCC features.

Everything here is deterministic and, apart from the chunker's carry buffer,
stateless. The MFCC pipeline is fixed: pre-emphasis 0.97, 25 ms Hamming
frames with 10 ms hop, 512-point magnitude spectrum, 26 triangular mel
filters over 0-8000 Hz, log floor 1e-10, orthonormal DCT-II keeping 13
coefficients. A 1-second chunk at 16 kHz yields a (98, 13) matrix.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, EmptyInputError, SampleRangeError

SAMPLE_RATE = 16000
CHUNK_SAMPLES = 16000

PRE_EMPHASIS = 0.97
FRAME_MS = 25
HOP_MS = 10
FRAME_LEN = SAMPLE_RATE * FRAME_MS // 1000   # 400
HOP_LEN = SAMPLE_RATE * HOP_MS // 1000       # 160
N_FFT = 512
N_MELS = 26
N_MFCC = 13
LOG_FLOOR = 1e-10
N_FRAMES = 1 + (CHUNK_SAMPLES - FRAME_LEN) // HOP_LEN  # 98

LOUDNESS_FLOOR_DBFS = -120.0


@dataclass
class AudioChunk:
    """One second of mono PCM at 16 kHz, the unit of classification."""

    samples: np.ndarray
    seq_no: int
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.shape != (CHUNK_SAMPLES,):
            raise DimensionError(
                f"chunk must have exactly {CHUNK_SAMPLES} samples, got {self.samples.shape}"
            )
        if np.any(np.abs(self.samples) > 1.0):
            raise SampleRangeError("chunk contains samples outside [-1, 1]")


@dataclass
class FeatureMatrix:
    """MFCC coefficients for one chunk, shape (n_frames, n_mfcc)."""

    coeffs: np.ndarray
    frame_ms: int = FRAME_MS
    hop_ms: int = HOP_MS

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if not np.all(np.isfinite(self.coeffs)):
            raise DimensionError("feature matrix contains non-finite entries")


class Chunker:
    """Cuts a sample stream into contiguous non-overlapping 1 s chunks.

    Trailing data shorter than one chunk is held in a carry buffer until
    more samples arrive; it is never emitted on its own. Single-owner:
    do not share one instance across threads.
    """

    def __init__(self):
        self._carry = np.empty(0, dtype=np.float64)
        self._next_seq = 0

    @property
    def pending(self) -> int:
        """Samples currently buffered below one chunk."""
        return len(self._carry)

    def feed(self, samples) -> list[AudioChunk]:
        samples = np.asarray(samples, dtype=np.float64)
        if samples.ndim != 1:
            raise DimensionError("expected a 1-D sample sequence")
        if samples.size and np.any(np.abs(samples) > 1.0):
            raise SampleRangeError("input samples outside [-1, 1]")
        buf = np.concatenate([self._carry, samples])
        chunks = []
        n_full = len(buf) // CHUNK_SAMPLES
        for i in range(n_full):
            chunks.append(
                AudioChunk(buf[i * CHUNK_SAMPLES:(i + 1) * CHUNK_SAMPLES], self._next_seq)
            )
            self._next_seq += 1
        self._carry = buf[n_full * CHUNK_SAMPLES:]
        return chunks


def chunk_audio(stream) -> list[AudioChunk]:
    """One-shot chunking of a finite sample sequence (trailing remainder dropped)."""
    return Chunker().feed(stream)


def compute_loudness(chunk: AudioChunk) -> float:
    """RMS loudness in dBFS, clamped to a floor of -120."""
    rms = float(np.sqrt(np.mean(np.square(chunk.samples))))
    if rms <= 0.0:
        return LOUDNESS_FLOOR_DBFS
    return max(LOUDNESS_FLOOR_DBFS, min(0.0, 20.0 * np.log10(rms)))


def dct_ii(v) -> np.ndarray:
    """Orthonormal DCT-II of a 1-D vector."""
    v = np.asarray(v, dtype=np.float64)
    n = v.shape[-1]
    if n == 0:
        raise EmptyInputError("dct_ii of an empty vector")
    return v @ _dct_matrix(n).T


def dct_iii(c) -> np.ndarray:
    """Inverse of dct_ii under the orthonormal convention."""
    c = np.asarray(c, dtype=np.float64)
    n = c.shape[-1]
    if n == 0:
        raise EmptyInputError("dct_iii of an empty vector")
    return c @ _dct_matrix(n)


_dct_cache: dict[int, np.ndarray] = {}


def _dct_matrix(n: int) -> np.ndarray:
    # rows are the orthonormal DCT-II basis vectors
    mat = _dct_cache.get(n)
    if mat is None:
        k = np.arange(n)[:, None]
        i = np.arange(n)[None, :]
        mat = np.cos(np.pi * k * (2 * i + 1) / (2 * n)) * np.sqrt(2.0 / n)
        mat[0] *= np.sqrt(0.5)
        _dct_cache[n] = mat
    return mat


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filter_centers(n_mels: int = N_MELS, f_lo: float = 0.0,
                       f_hi: float = SAMPLE_RATE / 2) -> np.ndarray:
    """Center frequencies (Hz) of the triangular filters."""
    mels = np.linspace(hz_to_mel(f_lo), hz_to_mel(f_hi), n_mels + 2)
    return mel_to_hz(mels)[1:-1]


_mel_cache: dict[tuple, np.ndarray] = {}


def mel_filterbank(n_mels: int = N_MELS, n_fft: int = N_FFT,
                   sample_rate: int = SAMPLE_RATE, f_lo: float = 0.0,
                   f_hi: float = SAMPLE_RATE / 2) -> np.ndarray:
    """Triangular filter weights, shape (n_mels, n_fft // 2 + 1).

    Triangles are evaluated at the exact bin frequencies (not snapped to
    bins), so every bin between the first and last centers has weight.
    """
    key = (n_mels, n_fft, sample_rate, f_lo, f_hi)
    bank = _mel_cache.get(key)
    if bank is not None:
        return bank
    edges = mel_to_hz(np.linspace(hz_to_mel(f_lo), hz_to_mel(f_hi), n_mels + 2))
    bin_hz = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    bank = np.zeros((n_mels, len(bin_hz)))
    for m in range(n_mels):
        lo, center, hi = edges[m], edges[m + 1], edges[m + 2]
        up = (bin_hz - lo) / (center - lo)
        down = (hi - bin_hz) / (hi - center)
        bank[m] = np.clip(np.minimum(up, down), 0.0, None)
    _mel_cache[key] = bank
    return bank


def frame_signal(samples: np.ndarray) -> np.ndarray:
    """Pre-emphasised, Hamming-windowed frames, shape (n_frames, FRAME_LEN)."""
    emphasised = np.empty_like(samples)
    emphasised[0] = samples[0]
    emphasised[1:] = samples[1:] - PRE_EMPHASIS * samples[:-1]
    n_frames = 1 + (len(samples) - FRAME_LEN) // HOP_LEN
    idx = np.arange(FRAME_LEN)[None, :] + HOP_LEN * np.arange(n_frames)[:, None]
    return emphasised[idx] * np.hamming(FRAME_LEN)


def mel_energies(chunk: AudioChunk) -> np.ndarray:
    """Per-frame mel-band magnitudes before the log/DCT, shape (98, 26).

    Exposed so the filter-bank response can be checked directly against
    known tones.
    """
    frames = frame_signal(chunk.samples)
    spectrum = np.abs(np.fft.rfft(frames, n=N_FFT, axis=1))
    return spectrum @ mel_filterbank().T


def compute_mfcc(chunk: AudioChunk) -> FeatureMatrix:
    """MFCC features for one chunk; pure and bit-deterministic."""
    logmel = np.log(np.maximum(mel_energies(chunk), LOG_FLOOR))
    coeffs = dct_ii(logmel)[:, :N_MFCC]
    return FeatureMatrix(coeffs)
