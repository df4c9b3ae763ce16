"""Single-clip annotation: features, labels, smoothing, word highlights.

Also extracts per-phoneme audio exemplars from a labeled corpus for
listening tests and the demo service.
"""

from __future__ import annotations

import base64
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
import scipy.signal

from .audio import AudioClip, EnergyTrack, compute_energy, compute_logmel, compute_spectrogram
from .bundle import ModelBundle
from .combine import combine, mask_noise, to_runs
from .mine import match_words
from .quantize import assign_labels

MIN_EXEMPLAR_FRAMES = 5


class RunSpan(NamedTuple):
    label: int
    start: float
    end: float
    noise: bool


class WordSpan(NamedTuple):
    ngram: tuple[int, ...]
    start_run: int
    end_run: int
    start: float
    end: float


@dataclass
class AnnotatedTranscript:
    """Everything the annotation UI renders for one clip."""

    runs: list[RunSpan]
    word_spans: list[WordSpan]
    raw_labels: np.ndarray
    energy: EnergyTrack
    spectrogram: np.ndarray
    frame_duration: float
    sentence_id: str = ""

    def to_dict(self) -> dict:
        spec = np.ascontiguousarray(self.spectrogram, dtype="<f4")
        return {
            "sentence_id": self.sentence_id,
            "frame_duration": self.frame_duration,
            "runs": [
                {"label": r.label, "start": r.start, "end": r.end, "noise": r.noise}
                for r in self.runs
            ],
            "word_spans": [
                {"ngram": list(w.ngram), "start_run": w.start_run,
                 "end_run": w.end_run, "start": w.start, "end": w.end}
                for w in self.word_spans
            ],
            "raw_labels": [int(x) for x in self.raw_labels],
            "energy": {"values": [float(v) for v in self.energy.values],
                       "hop": self.energy.hop},
            "spectrogram": {
                "n_frames": int(spec.shape[0]),
                "n_bins": int(spec.shape[1]) if spec.ndim == 2 else 0,
                "data": base64.b64encode(spec.tobytes()).decode("ascii"),
            },
        }


@dataclass(frozen=True)
class PhonemeExemplar:
    """A run of one label long enough to audition in isolation."""

    label: int
    sentence_id: str
    start: float
    end: float
    n_frames: int


def resample_clip(clip: AudioClip, rate: int) -> AudioClip:
    if clip.sample_rate == rate:
        return clip
    ratio = Fraction(rate, clip.sample_rate)
    samples = scipy.signal.resample_poly(clip.samples, ratio.numerator, ratio.denominator)
    return AudioClip(np.clip(samples, -1.0, 1.0), rate, clip.source_id, clip.dog_id)


def transcribe(clip: AudioClip, bundle: ModelBundle) -> AnnotatedTranscript:
    """Run the full single-clip pipeline against a trained bundle.

    Keeps the raw pre-combination labels alongside the smoothed runs so
    both can be displayed; word spans come from the same greedy matcher
    used for corpus coverage.
    """
    cfg = bundle.feature
    if cfg.kind != "logmel":
        raise ValueError(f"cannot extract {cfg.kind!r} features for new audio")
    clip = resample_clip(clip, cfg.sample_rate)
    features = compute_logmel(clip, cfg.n_mels, cfg.frame_duration, cfg.hop)
    energy = compute_energy(clip, cfg.frame_duration, cfg.hop)
    spectrogram = compute_spectrogram(clip, cfg.frame_duration, cfg.hop)
    if features.n_frames == 0:
        return AnnotatedTranscript([], [], np.empty(0, dtype=np.int64), energy,
                                   spectrogram, cfg.frame_duration,
                                   sentence_id=clip.source_id)
    raw = assign_labels(features, bundle.codebook, sentence_id=clip.source_id,
                        dog_id=clip.dog_id)
    transcript = mask_noise(to_runs(combine(raw, bundle.combiner)),
                            bundle.noise_labels)

    fd = cfg.frame_duration
    runs = []
    offset = 0
    for (label, n), noise in zip(transcript.runs, transcript.noise_flags):
        runs.append(RunSpan(label, offset * fd, (offset + n) * fd, noise))
        offset += n

    word_spans = []
    for m in match_words(transcript.labels, bundle.vocabulary.words):
        word_spans.append(WordSpan(m.ngram, m.start, m.end,
                                   runs[m.start].start, runs[m.end - 1].end))

    return AnnotatedTranscript(runs, word_spans, raw.labels, energy, spectrogram,
                               fd, sentence_id=clip.source_id)


def extract_exemplars(transcripts, label: int,
                      min_frames: int = MIN_EXEMPLAR_FRAMES,
                      max_count: int = 10, seed: int = 0) -> list[PhonemeExemplar]:
    """Seeded uniform sample of sufficiently long runs of one label."""
    candidates = []
    for t in transcripts:
        offset = 0
        for run_label, n in t.runs:
            if run_label == label and n >= min_frames:
                candidates.append(PhonemeExemplar(
                    label, t.sentence_id, offset * t.frame_duration,
                    (offset + n) * t.frame_duration, n))
            offset += n
    if len(candidates) <= max_count:
        return candidates
    rng = np.random.default_rng([seed, label])
    picked = sorted(rng.choice(len(candidates), size=max_count, replace=False))
    return [candidates[i] for i in picked]
