"""Dataset tooling: WAV ingestion, silence trimming, cutting, splitting, and
a synthetic snore/non-snore corpus generator.

The generator mirrors the 500/500 composition with 10 ambient classes of 50
samples each and 27.4% of snores mixed with background noise. Snores are
low-band (60-300 Hz) amplitude-modulated noise; every ambient generator
keeps its energy above 300 Hz so the classes are separable by a spectral
cue the classifier has to learn.
"""

import wave
from dataclasses import dataclass

import numpy as np

from .dsp import CHUNK_SAMPLES, SAMPLE_RATE, AudioChunk, chunk_audio
from .errors import SplitTooSmallError, UnsupportedFormatError
from .nnet.rng import SplitMix64

SILENCE_FRAME = SAMPLE_RATE // 100       # 10 ms
SILENCE_MIN_RUN = 10                     # frames, i.e. 100 ms

AMBIENT_CLASSES = [
    "baby_crying", "clock_ticking", "toilet_flushing", "siren", "tv_noise",
    "car_noise", "people_talking", "rain", "thunderstorm", "babble",
]


@dataclass
class LabelledSample:
    chunk: AudioChunk
    label: int  # 0 = non-snore, 1 = snore
    source_id: str

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")


@dataclass
class CorpusSpec:
    n_snore: int = 500
    n_non_snore: int = 500
    snore_noisy_fraction: float = 0.274
    samples_per_category: int = 50
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.snore_noisy_fraction <= 1.0:
            raise ValueError("snore_noisy_fraction must be in [0, 1]")
        if self.samples_per_category * len(AMBIENT_CLASSES) != self.n_non_snore:
            raise ValueError("ambient category counts must sum to n_non_snore")


def trim_silence(samples, threshold_dbfs: float = -50.0) -> np.ndarray:
    """Drop maximal silent runs of >= 100 ms (per-10ms-frame RMS below threshold)."""
    samples = np.asarray(samples, dtype=np.float64)
    n_frames = len(samples) // SILENCE_FRAME
    if n_frames == 0:
        return samples.copy()
    frames = samples[:n_frames * SILENCE_FRAME].reshape(n_frames, SILENCE_FRAME)
    rms = np.sqrt(np.mean(np.square(frames), axis=1))
    with np.errstate(divide="ignore"):
        silent = 20.0 * np.log10(np.where(rms > 0, rms, 1e-300)) < threshold_dbfs
    keep = np.ones(len(samples), dtype=bool)
    i = 0
    while i < n_frames:
        if silent[i]:
            j = i
            while j < n_frames and silent[j]:
                j += 1
            if j - i >= SILENCE_MIN_RUN:
                keep[i * SILENCE_FRAME:j * SILENCE_FRAME] = False
            i = j
        else:
            i += 1
    return samples[keep]


def cut_samples(samples, label: int, source_id: str = "") -> list[LabelledSample]:
    """Cut trimmed audio into non-overlapping 1 s labelled samples."""
    return [LabelledSample(chunk, label, source_id) for chunk in chunk_audio(samples)]


def split_dataset(samples, ratio: float = 0.8, seed: int = 0):
    """Deterministic stratified split into (train, test).

    Per-class train counts are round(ratio * n_class), then nudged by at
    most one sample per class so the overall train size is round(ratio * N).
    """
    samples = list(samples)
    n = len(samples)
    if n < 5:
        raise SplitTooSmallError(f"need at least 5 samples to split, got {n}")
    by_class: dict[int, list] = {}
    for idx, s in enumerate(samples):
        by_class.setdefault(s.label, []).append(idx)

    rng = SplitMix64(seed)
    target_total = round(ratio * n)
    take = {}
    for label in sorted(by_class):
        rng.shuffle(by_class[label])
        take[label] = round(ratio * len(by_class[label]))
    # reconcile rounding drift against the overall target
    diff = target_total - sum(take.values())
    labels_cycle = sorted(by_class, key=lambda l: -len(by_class[l]))
    k = 0
    while diff != 0 and labels_cycle:
        label = labels_cycle[k % len(labels_cycle)]
        step = 1 if diff > 0 else -1
        new = take[label] + step
        if 0 <= new <= len(by_class[label]):
            take[label] = new
            diff -= step
        k += 1

    train, test = [], []
    for label in sorted(by_class):
        idxs = by_class[label]
        train.extend(samples[i] for i in idxs[:take[label]])
        test.extend(samples[i] for i in idxs[take[label]:])
    return train, test


def low_band_energy_fraction(samples, f_lo: float = 60.0, f_hi: float = 300.0) -> float:
    """Fraction of spectral energy inside [f_lo, f_hi] Hz."""
    spec = np.abs(np.fft.rfft(np.asarray(samples, dtype=np.float64))) ** 2
    freqs = np.fft.rfftfreq(len(samples), d=1.0 / SAMPLE_RATE)
    total = float(spec.sum())
    if total == 0.0:
        return 0.0
    band = float(spec[(freqs >= f_lo) & (freqs <= f_hi)].sum())
    return band / total


def _bandpass_noise(rng, n, f_lo, f_hi):
    spec = np.fft.rfft(rng.standard_normal(n))
    freqs = np.fft.rfftfreq(n, d=1.0 / SAMPLE_RATE)
    spec[(freqs < f_lo) | (freqs > f_hi)] = 0.0
    out = np.fft.irfft(spec, n)
    peak = np.max(np.abs(out))
    return out / peak if peak > 0 else out


def _normalise(x, level):
    peak = np.max(np.abs(x))
    return x * (level / peak) if peak > 0 else x


def _synth_snore(rng):
    t = np.arange(CHUNK_SAMPLES) / SAMPLE_RATE
    carrier = _bandpass_noise(rng, CHUNK_SAMPLES, 60.0, 300.0)
    f_mod = rng.uniform(0.5, 1.5)
    phase = rng.uniform(0, 2 * np.pi)
    envelope = np.maximum(0.0, np.sin(2 * np.pi * f_mod * t + phase)) ** 2
    envelope += 0.05  # breath noise floor so silence trimming never fires
    return _normalise(carrier * envelope, rng.uniform(0.2, 0.9))


def _synth_ambient(rng, category: str):
    t = np.arange(CHUNK_SAMPLES) / SAMPLE_RATE
    if category == "rain":
        x = _bandpass_noise(rng, CHUNK_SAMPLES, 500.0, 7500.0)
    elif category == "clock_ticking":
        x = np.zeros(CHUNK_SAMPLES)
        period = int(SAMPLE_RATE / rng.uniform(1.5, 2.5))
        for start in range(rng.integers(0, period // 2), CHUNK_SAMPLES, period):
            click = rng.standard_normal(200) * np.exp(-np.arange(200) / 30.0)
            end = min(start + 200, CHUNK_SAMPLES)
            x[start:end] += click[:end - start]
        x = _bandpass_noise_apply(x, 800.0, 7000.0)
    elif category == "siren":
        f = 900.0 + 350.0 * np.sin(2 * np.pi * rng.uniform(0.5, 2.0) * t)
        x = np.sin(2 * np.pi * np.cumsum(f) / SAMPLE_RATE)
    elif category == "babble" or category == "people_talking":
        env = np.abs(_bandpass_noise(rng, CHUNK_SAMPLES, 2.0, 8.0)) + 0.2
        x = _bandpass_noise(rng, CHUNK_SAMPLES, 300.0, 3400.0) * env
    elif category == "tv_noise":
        x = 0.7 * _bandpass_noise(rng, CHUNK_SAMPLES, 400.0, 6000.0)
        x += 0.3 * np.sin(2 * np.pi * rng.uniform(440, 2000) * t)
    elif category == "car_noise":
        x = _bandpass_noise(rng, CHUNK_SAMPLES, 350.0, 1500.0)
    elif category == "thunderstorm":
        decay = np.exp(-t / rng.uniform(0.3, 0.8))
        x = _bandpass_noise(rng, CHUNK_SAMPLES, 400.0, 3000.0) * (decay + 0.1)
    elif category == "baby_crying":
        f0 = rng.uniform(400.0, 600.0)
        vibrato = 1.0 + 0.05 * np.sin(2 * np.pi * 6.0 * t)
        x = np.sin(2 * np.pi * f0 * vibrato * t)
        x *= np.maximum(0.0, np.sin(2 * np.pi * rng.uniform(0.8, 1.5) * t)) + 0.2
    elif category == "toilet_flushing":
        swell = np.minimum(1.0, t / 0.2) * np.exp(-np.maximum(0.0, t - 0.5))
        x = _bandpass_noise(rng, CHUNK_SAMPLES, 500.0, 5000.0) * (swell + 0.1)
    else:
        raise ValueError(f"unknown ambient category {category!r}")
    return _normalise(x, rng.uniform(0.2, 0.9))


def _bandpass_noise_apply(x, f_lo, f_hi):
    spec = np.fft.rfft(x)
    freqs = np.fft.rfftfreq(len(x), d=1.0 / SAMPLE_RATE)
    spec[(freqs < f_lo) | (freqs > f_hi)] = 0.0
    return np.fft.irfft(spec, len(x))


def generate_synthetic_corpus(spec: CorpusSpec | None = None) -> list[LabelledSample]:
    """Deterministic-per-seed synthetic corpus matching the spec counts."""
    spec = spec or CorpusSpec()
    rng = np.random.default_rng(spec.seed)
    samples = []
    n_noisy = round(spec.snore_noisy_fraction * spec.n_snore)
    for i in range(spec.n_snore):
        x = _synth_snore(rng)
        source = f"snore/{i:04d}"
        if i < n_noisy:
            ambient = _synth_ambient(rng, AMBIENT_CLASSES[i % len(AMBIENT_CLASSES)])
            # background at -10 dB relative to the snore, by RMS
            snore_rms = np.sqrt(np.mean(np.square(x)))
            amb_rms = np.sqrt(np.mean(np.square(ambient)))
            if amb_rms > 0:
                ambient = ambient * (snore_rms * 10 ** (-10 / 20) / amb_rms)
            x = _normalise(x + ambient, min(0.95, float(np.max(np.abs(x + ambient)))))
            source = f"snore_noisy/{i:04d}"
        samples.append(LabelledSample(AudioChunk(x, seq_no=0), 1, source))
    for c_idx, category in enumerate(AMBIENT_CLASSES):
        for j in range(spec.samples_per_category):
            x = _synth_ambient(rng, category)
            samples.append(
                LabelledSample(AudioChunk(x, seq_no=0), 0, f"{category}/{j:04d}")
            )
    return samples


def load_wav(path) -> np.ndarray:
    """Read a 16 kHz / 16-bit / mono PCM WAV into float64 samples in [-1, 1]."""
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            comp = wf.getcomptype()
            if comp != "NONE":
                raise UnsupportedFormatError(f"compression {comp!r} not supported, need PCM")
            if n_channels != 1:
                raise UnsupportedFormatError(f"channels = {n_channels}, need mono")
            if width != 2:
                raise UnsupportedFormatError(f"sample width = {8 * width} bit, need 16 bit")
            if rate != SAMPLE_RATE:
                raise UnsupportedFormatError(f"sample rate = {rate} Hz, need {SAMPLE_RATE} Hz")
            raw = wf.readframes(wf.getnframes())
    except wave.Error as e:
        raise UnsupportedFormatError(f"not a readable WAV file: {e}") from e
    ints = np.frombuffer(raw, dtype="<i2")
    return ints.astype(np.float64) / 32768.0


def save_wav(path, samples) -> None:
    """Write samples to a 16 kHz / 16-bit / mono PCM WAV (inverse of load_wav)."""
    samples = np.asarray(samples, dtype=np.float64)
    ints = np.clip(np.round(samples * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(SAMPLE_RATE)
        wf.writeframes(ints.tobytes())


def load_directory(root) -> list[LabelledSample]:
    """Load the `<root>/snore/*.wav` + `<root>/non_snore/*.wav` layout."""
    from pathlib import Path

    root = Path(root)
    out = []
    for sub, label in (("snore", 1), ("non_snore", 0)):
        for path in sorted((root / sub).glob("*.wav")):
            trimmed = trim_silence(load_wav(path))
            out.extend(cut_samples(trimmed, label, source_id=f"{sub}/{path.name}"))
    return out
