"""Audio loading and per-frame feature extraction.

Everything downstream (quantization, smoothing, mining) operates on frame
matrices produced here: log-mel features computed locally, or embedding
matrices ingested from the binary frame-vector container.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.signal
from scipy.io import wavfile

WORKING_SAMPLE_RATE = 16000
DEFAULT_FRAME_DURATION = 0.02
DEFAULT_HOP = 0.02
LOG_EPS = 1e-10

EMBEDDING_MAGIC = b"DGFV"
EMBEDDING_VERSION = 1
_EMBEDDING_HEADER = struct.Struct("<4sIIIdd")


class AudioLoadError(Exception):
    """Raised when a file cannot be decoded as PCM WAV audio."""


class EmbeddingFormatError(Exception):
    """Raised when a frame-vector container file is malformed."""


@dataclass
class AudioClip:
    """Mono audio with samples in [-1, 1].

    Args:
        samples: float64 array of amplitudes in [-1, 1].
        sample_rate: sampling rate in Hz.
        source_id: identifier of the originating recording.
        dog_id: identifier of the dog, empty if unknown.
    """

    samples: np.ndarray
    sample_rate: int
    source_id: str = ""
    dog_id: str = ""

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("AudioClip samples must be 1-D")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass
class FrameFeatures:
    """Per-frame feature matrix on a fixed time grid.

    kind is "logmel" for locally computed features or "external-embedding"
    for matrices read from a container file.
    """

    matrix: np.ndarray
    frame_duration: float
    hop: float
    kind: str = "logmel"
    start_offset: float = 0.0

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2:
            raise ValueError("feature matrix must be 2-D (n_frames x dim)")
        if self.frame_duration <= 0 or self.hop <= 0:
            raise ValueError("frame_duration and hop must be positive")

    @property
    def n_frames(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


@dataclass
class EnergyTrack:
    """Per-frame RMS amplitudes on the same grid as the features."""

    values: np.ndarray
    hop: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if np.any(self.values < 0):
            raise ValueError("energy values must be non-negative")


def load_audio(path, working_rate: int = WORKING_SAMPLE_RATE,
               source_id: str | None = None, dog_id: str = "") -> AudioClip:
    """Load a PCM WAV file as a mono clip at the working sample rate.

    Stereo is downmixed by channel mean; integer formats are scaled to
    [-1, 1]; the clip is resampled by polyphase windowed-sinc filtering.
    """
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise AudioLoadError(f"unsupported format: {exc}") from exc
    if data.size == 0:
        raise AudioLoadError("zero-length audio")

    if data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    elif data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise AudioLoadError(f"unsupported sample format {data.dtype}")

    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    samples = np.clip(samples, -1.0, 1.0)

    if rate != working_rate:
        ratio = Fraction(working_rate, int(rate))
        samples = scipy.signal.resample_poly(samples, ratio.numerator, ratio.denominator)
        samples = np.clip(samples, -1.0, 1.0)

    if source_id is None:
        source_id = Path(path).stem if isinstance(path, (str, Path)) else ""
    return AudioClip(samples, working_rate, source_id=source_id, dog_id=dog_id)


def save_wav(path, clip: AudioClip) -> None:
    """Write a clip as 16-bit PCM WAV."""
    pcm = np.round(np.clip(clip.samples, -1.0, 1.0) * 32767.0).astype(np.int16)
    wavfile.write(path, clip.sample_rate, pcm)


def _frame_lengths(clip: AudioClip, frame_duration: float, hop: float):
    if frame_duration <= 0 or hop <= 0:
        raise ValueError("frame_duration and hop must be positive")
    if frame_duration < hop:
        raise ValueError("frame_duration must be >= hop")
    frame_len = int(round(frame_duration * clip.sample_rate))
    hop_len = int(round(hop * clip.sample_rate))
    if frame_len < 1 or hop_len < 1:
        raise ValueError("frame grid too fine for the sample rate")
    return frame_len, hop_len


def frame_signal(clip: AudioClip, frame_duration: float, hop: float) -> np.ndarray:
    """Slice the clip into complete frames (n_frames x frame_len).

    Frames count only full windows: a clip shorter than one frame yields
    an empty array.
    """
    frame_len, hop_len = _frame_lengths(clip, frame_duration, hop)
    n = len(clip.samples)
    if n < frame_len:
        return np.empty((0, frame_len))
    n_frames = (n - frame_len) // hop_len + 1
    idx = np.arange(frame_len)[None, :] + hop_len * np.arange(n_frames)[:, None]
    return clip.samples[idx]


def next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, n_fft: int, sample_rate: int,
                   fmin: float = 0.0, fmax: float | None = None) -> np.ndarray:
    """Triangular mel filterbank over rFFT bins (n_mels x n_fft//2+1)."""
    if fmax is None:
        fmax = sample_rate / 2.0
    mel_pts = np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2)
    hz_pts = mel_to_hz(mel_pts)
    bin_freqs = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    fb = np.zeros((n_mels, len(bin_freqs)))
    for m in range(n_mels):
        lo, ctr, hi = hz_pts[m], hz_pts[m + 1], hz_pts[m + 2]
        up = (bin_freqs - lo) / max(ctr - lo, 1e-12)
        down = (hi - bin_freqs) / max(hi - ctr, 1e-12)
        fb[m] = np.maximum(0.0, np.minimum(up, down))
    return fb


def stft_magnitudes(clip: AudioClip, frame_duration: float, hop: float):
    """Hann-windowed rFFT magnitudes per frame.

    Returns (magnitudes, windowed_frames, n_fft); FFT size is the next
    power of two >= frame length.
    """
    frames = frame_signal(clip, frame_duration, hop)
    frame_len = frames.shape[1]
    n_fft = next_pow2(frame_len)
    window = scipy.signal.get_window("hann", frame_len, fftbins=True)
    windowed = frames * window[None, :]
    mags = np.abs(np.fft.rfft(windowed, n=n_fft, axis=1))
    return mags, windowed, n_fft


def compute_logmel(clip: AudioClip, n_mels: int = 40,
                   frame_duration: float = DEFAULT_FRAME_DURATION,
                   hop: float = DEFAULT_HOP) -> FrameFeatures:
    """Log mel-filterbank energies per frame.

    Stand-in for externally computed transformer-layer embeddings: the
    downstream quantizer only requires frames on a fixed grid.
    """
    if n_mels < 1:
        raise ValueError("n_mels must be >= 1")
    mags, _, n_fft = stft_magnitudes(clip, frame_duration, hop)
    fb = mel_filterbank(n_mels, n_fft, clip.sample_rate)
    energies = mags ** 2 @ fb.T
    return FrameFeatures(np.log(energies + LOG_EPS), frame_duration, hop, kind="logmel")


def compute_energy(clip: AudioClip, frame_duration: float = DEFAULT_FRAME_DURATION,
                   hop: float = DEFAULT_HOP) -> EnergyTrack:
    """Per-frame RMS amplitude of the raw samples, no windowing."""
    frames = frame_signal(clip, frame_duration, hop)
    if frames.shape[0] == 0:
        return EnergyTrack(np.empty(0), hop)
    rms = np.sqrt(np.mean(frames ** 2, axis=1))
    return EnergyTrack(rms, hop)


def compute_spectrogram(clip: AudioClip, frame_duration: float = DEFAULT_FRAME_DURATION,
                        hop: float = DEFAULT_HOP) -> np.ndarray:
    """dB magnitude spectrogram (n_frames x n_bins), bin 0 = DC."""
    mags, _, _ = stft_magnitudes(clip, frame_duration, hop)
    return 20.0 * np.log10(mags + LOG_EPS)


def save_embeddings(path, features: FrameFeatures) -> None:
    """Write features to the binary frame-vector container."""
    mat = np.ascontiguousarray(features.matrix, dtype="<f4")
    header = _EMBEDDING_HEADER.pack(
        EMBEDDING_MAGIC, EMBEDDING_VERSION,
        features.n_frames, features.dim,
        features.frame_duration, features.hop,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(mat.tobytes())


def load_embeddings(path) -> FrameFeatures:
    """Read a frame-vector container file.

    Layout (little-endian): magic "DGFV", u32 version, u32 n_frames,
    u32 dim, f64 frame_duration, f64 hop, then n_frames*dim f32 row-major.
    """
    with open(path, "rb") as fh:
        head = fh.read(_EMBEDDING_HEADER.size)
        if len(head) < _EMBEDDING_HEADER.size:
            raise EmbeddingFormatError("truncated header")
        magic, version, n_frames, dim, frame_duration, hop = _EMBEDDING_HEADER.unpack(head)
        if magic != EMBEDDING_MAGIC:
            raise EmbeddingFormatError(f"bad magic {magic!r}")
        if version != EMBEDDING_VERSION:
            raise EmbeddingFormatError(f"unknown version {version}")
        if dim < 1:
            raise EmbeddingFormatError("dim must be >= 1")
        payload = fh.read(4 * n_frames * dim)
        if len(payload) < 4 * n_frames * dim:
            raise EmbeddingFormatError("truncated payload")
    matrix = np.frombuffer(payload, dtype="<f4").reshape(n_frames, dim).astype(np.float64)
    return FrameFeatures(matrix, frame_duration, hop, kind="external-embedding")


def stack_features(parts: list[FrameFeatures]) -> np.ndarray:
    """Concatenate feature matrices, checking they share dim and grid."""
    if not parts:
        raise ValueError("no features to stack")
    dim = parts[0].dim
    fd, hop = parts[0].frame_duration, parts[0].hop
    for p in parts[1:]:
        if p.dim != dim:
            raise ValueError(f"feature dim mismatch: {p.dim} != {dim}")
        if p.frame_duration != fd or p.hop != hop:
            raise ValueError("feature frame grids differ")
    return np.concatenate([p.matrix for p in parts], axis=0)
