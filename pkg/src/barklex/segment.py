"""Sentence extraction from framewise detector scores.

Framewise scores (from an external sound-event detector, or the built-in
energy fallback) are thresholded into runs, merged across short gaps and
padded into "sentences", then filtered by audio-tag scores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import EnergyTrack

GAP_MAX = 1.0
PAD = 0.5
TAG_THRESHOLD = 0.1
DOG_TAG = "Dog"

# Allowlist of tag labels considered dog-related; anything else above the
# tag threshold disqualifies a sentence.
DEFAULT_DOG_LABELS = frozenset(
    {"Dog", "Bark", "Howl", "Growling", "Whimper", "Yip", "Bow-wow", "Animal"}
)


@dataclass
class FramewiseScore:
    """Per-frame detector scores in [0, 1] on a fixed hop grid."""

    values: np.ndarray
    hop: float
    source_id: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.hop <= 0:
            raise ValueError("hop must be positive")
        if self.values.size and (self.values.min() < 0 or self.values.max() > 1):
            raise ValueError("framewise scores must lie in [0, 1]")


@dataclass(frozen=True)
class SentenceSpan:
    """A detected vocalization interval within a source recording."""

    start: float
    end: float
    source_id: str = ""
    dog_id: str = ""

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError("span end must exceed start")
        if self.start < 0:
            raise ValueError("span start must be >= 0")

    @property
    def duration(self) -> float:
        return self.end - self.start


def energy_to_framewise(energy: EnergyTrack, source_id: str = "") -> FramewiseScore:
    """Fallback detector: energy normalized to [0, 1] by its maximum."""
    values = energy.values
    peak = values.max() if values.size else 0.0
    if peak > 0:
        values = values / peak
    return FramewiseScore(np.clip(values, 0.0, 1.0), energy.hop, source_id)


def dynamic_threshold(scores: FramewiseScore) -> float:
    """Score threshold for sentence extraction: min(0.75 * max, 0.5)."""
    if scores.values.size == 0:
        raise ValueError("empty score track")
    return min(0.75 * float(scores.values.max()), 0.5)


def extract_clips(scores: FramewiseScore, threshold: float) -> list[SentenceSpan]:
    """Maximal runs of frames with score >= threshold, in seconds."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    spans = []
    above = scores.values >= threshold
    i = 0
    n = len(above)
    while i < n:
        if above[i]:
            j = i
            while j < n and above[j]:
                j += 1
            spans.append(SentenceSpan(i * scores.hop, j * scores.hop,
                                      source_id=scores.source_id))
            i = j
        else:
            i += 1
    return spans


def _merge(spans: list[SentenceSpan], gap_max: float) -> list[SentenceSpan]:
    merged = [spans[0]]
    for span in spans[1:]:
        prev = merged[-1]
        if span.start - prev.end < gap_max:
            merged[-1] = SentenceSpan(prev.start, max(prev.end, span.end),
                                      prev.source_id, prev.dog_id)
        else:
            merged.append(span)
    return merged


def merge_and_pad(spans: list[SentenceSpan], clip_duration: float,
                  gap_max: float = GAP_MAX, pad: float = PAD) -> list[SentenceSpan]:
    """Merge spans separated by gaps < gap_max, then pad each side.

    Padding is clamped to [0, clip_duration]; spans that overlap after
    padding are merged again (gap 0 counts as overlap for that pass).
    """
    if not spans:
        return []
    for a, b in zip(spans, spans[1:]):
        if b.start < a.end:
            raise ValueError("input spans must be sorted and non-overlapping")
    merged = _merge(spans, gap_max)
    padded = [
        SentenceSpan(max(0.0, s.start - pad), min(clip_duration, s.end + pad),
                     s.source_id, s.dog_id)
        for s in merged
    ]
    # strict overlap only: padded spans that merely touch stay separate
    return _merge(padded, 0.0)


def filter_by_tags(span: SentenceSpan, tags: dict[str, float],
                   dog_labels: frozenset[str] = DEFAULT_DOG_LABELS,
                   tag_threshold: float = TAG_THRESHOLD) -> tuple[bool, str]:
    """Decide whether a sentence survives the audio-tag filter.

    Dropped when the "Dog" score is below the threshold, or when any label
    outside the dog allowlist exceeds it. Returns (keep, reason).
    """
    if not dog_labels:
        raise ValueError("dog_labels must be non-empty")
    if DOG_TAG not in tags:
        return False, "missing dog tag"
    dog_score = tags[DOG_TAG]
    if dog_score < tag_threshold:
        return False, f"dog score {dog_score:.3g} < {tag_threshold:.3g}"
    for label, score in sorted(tags.items()):
        if label not in dog_labels and score > tag_threshold:
            return False, f"non-dog label {label!r} score {score:.3g} > {tag_threshold:.3g}"
    return True, "ok"
