"""Label-sequence smoothing and run-length transcripts.

Short runs sandwiched between two runs of one identical label are
assimilated by that label, bounded by a tolerance on the run length.
Smoothed sequences are kept as run-length transcripts for mining,
statistics and display.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .quantize import LabelSequence

# Cluster labels judged to be noise rather than dog sound for the
# reference 50-cluster model; display-time flags only.
DEFAULT_NOISE_LABELS = frozenset(
    {2, 3, 4, 5, 6, 8, 13, 15, 18, 19, 25, 35, 36, 38, 39, 45}
)


@dataclass(frozen=True)
class CombinerConfig:
    """tolerance: maximum run length that identical flanking labels absorb."""

    tolerance: int = 1

    def __post_init__(self):
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")


@dataclass
class Transcript:
    """Run-length encoded label sequence for one sentence.

    runs are (label, n_frames) pairs with adjacent labels distinct;
    noise_flags, when set, parallels runs.
    """

    runs: list[tuple[int, int]]
    frame_duration: float
    sentence_id: str = ""
    dog_id: str = ""
    noise_flags: list[bool] | None = None

    def __post_init__(self):
        self.runs = [(int(l), int(n)) for l, n in self.runs]
        for (a, _), (b, _) in zip(self.runs, self.runs[1:]):
            if a == b:
                raise ValueError("adjacent runs must have distinct labels")
        if any(n < 1 for _, n in self.runs):
            raise ValueError("run lengths must be >= 1")

    @property
    def n_frames(self) -> int:
        return sum(n for _, n in self.runs)

    @property
    def labels(self) -> tuple[int, ...]:
        """Run-level label sequence (one symbol per run)."""
        return tuple(l for l, _ in self.runs)

    @property
    def duration(self) -> float:
        return self.n_frames * self.frame_duration


@dataclass(frozen=True)
class PhonemeStat:
    """Run-length statistics for one label, durations in seconds."""

    label: int
    mean_length: float
    var_length: float
    n_runs: int


def _rle(labels) -> list[tuple[int, int]]:
    runs = []
    for lab in labels:
        lab = int(lab)
        if runs and runs[-1][0] == lab:
            runs[-1] = (lab, runs[-1][1] + 1)
        else:
            runs.append((lab, 1))
    return runs


def combine(labels: LabelSequence, config: CombinerConfig) -> LabelSequence:
    """Assimilate short runs flanked by one identical label on both sides.

    Scans runs left to right, eagerly relabeling any run of length <=
    tolerance whose two neighbors share a label; passes repeat until a
    fixed point. Sequence length is preserved.
    """
    if config.tolerance == 0 or len(labels) == 0:
        return LabelSequence(labels.labels.copy(), labels.frame_duration,
                             labels.sentence_id, labels.dog_id)
    runs = _rle(labels.labels)
    changed = True
    while changed:
        changed = False
        i = 1
        while i < len(runs) - 1:
            lab, count = runs[i]
            left, right = runs[i - 1], runs[i + 1]
            if count <= config.tolerance and left[0] == right[0] != lab:
                runs[i - 1:i + 2] = [(left[0], left[1] + count + right[1])]
                changed = True
                # the merged run sits at i-1; the old i+2 run is now at i
            else:
                i += 1
    out = np.concatenate([np.full(n, l, dtype=np.int64) for l, n in runs]) \
        if runs else np.empty(0, dtype=np.int64)
    return LabelSequence(out, labels.frame_duration, labels.sentence_id, labels.dog_id)


def to_runs(labels: LabelSequence) -> Transcript:
    """Run-length encode a label sequence."""
    return Transcript(_rle(labels.labels), labels.frame_duration,
                      labels.sentence_id, labels.dog_id)


def from_runs(transcript: Transcript) -> LabelSequence:
    """Expand a transcript back to per-frame labels."""
    if transcript.runs:
        labels = np.concatenate(
            [np.full(n, l, dtype=np.int64) for l, n in transcript.runs])
    else:
        labels = np.empty(0, dtype=np.int64)
    return LabelSequence(labels, transcript.frame_duration,
                         transcript.sentence_id, transcript.dog_id)


def phoneme_length_stats(transcripts) -> list[PhonemeStat]:
    """Mean and population variance of run duration per label.

    All transcripts must share one frame duration; labels with no runs
    are omitted.
    """
    transcripts = list(transcripts)
    durations: dict[int, list[float]] = {}
    fd = None
    for t in transcripts:
        if fd is None:
            fd = t.frame_duration
        elif t.frame_duration != fd:
            raise ValueError("transcripts have mixed frame durations")
        for label, n in t.runs:
            durations.setdefault(label, []).append(n * t.frame_duration)
    stats = []
    for label in sorted(durations):
        arr = np.array(durations[label])
        stats.append(PhonemeStat(label, float(arr.mean()),
                                 float(arr.var()), len(arr)))
    return stats


def mask_noise(transcript: Transcript, noise: frozenset[int]) -> Transcript:
    """Flag runs whose label belongs to the noise set; removes nothing."""
    flags = [label in noise for label, _ in transcript.runs]
    return Transcript(list(transcript.runs), transcript.frame_duration,
                      transcript.sentence_id, transcript.dog_id,
                      noise_flags=flags)


def transcript_to_dict(t: Transcript) -> dict:
    d = {
        "sentence_id": t.sentence_id,
        "dog_id": t.dog_id,
        "frame_duration": t.frame_duration,
        "runs": [[l, n] for l, n in t.runs],
    }
    if t.noise_flags is not None:
        d["noise_flags"] = t.noise_flags
    return d


def transcript_from_dict(d: dict) -> Transcript:
    return Transcript(
        [(l, n) for l, n in d["runs"]],
        d["frame_duration"],
        d.get("sentence_id", ""),
        d.get("dog_id", ""),
        noise_flags=d.get("noise_flags"),
    )


def save_transcripts(path, transcripts) -> None:
    """Write transcripts as newline-delimited JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        for t in transcripts:
            fh.write(json.dumps(transcript_to_dict(t)) + "\n")


def load_transcripts(path) -> list[Transcript]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(transcript_from_dict(json.loads(line)))
    return out
