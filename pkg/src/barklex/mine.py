"""N-gram vocabulary mining over run-level transcripts.

Every n-gram window over the corpus is enumerated and scored by
popularity: its within-order relative frequency times the number of
distinct dogs that utter it. The vocabulary keeps high-scoring grams,
longest order first, dropping any gram contained in an already selected
longer word. Coverage measures how much of the corpus those words span.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

from .combine import Transcript


class NGramOccurrence(NamedTuple):
    ngram: tuple[int, ...]
    sentence_index: int
    position: int


@dataclass(frozen=True)
class CorpusSentence:
    """One sentence as a run-level label sequence.

    run_frames, when present, holds the frame count behind each position
    and weights duration-based coverage. noise_mask flags positions whose
    label belongs to the noise set.
    """

    dog_id: str
    labels: tuple[int, ...]
    sentence_id: str = ""
    run_frames: tuple[int, ...] | None = None
    frame_duration: float | None = None
    noise_mask: tuple[bool, ...] | None = None

    def position_weight(self, i: int) -> float:
        if self.run_frames is None:
            return 1.0
        fd = self.frame_duration if self.frame_duration is not None else 1.0
        return self.run_frames[i] * fd


@dataclass
class Corpus:
    """Sentences plus the set of distinct dogs behind them."""

    sentences: list[CorpusSentence]

    def __post_init__(self):
        for s in self.sentences:
            if len(s.labels) == 0:
                raise ValueError("corpus sentences must be non-empty")

    @property
    def dogs(self) -> frozenset[str]:
        return frozenset(s.dog_id for s in self.sentences)

    @classmethod
    def from_sequences(cls, by_dog: dict[str, list]) -> "Corpus":
        """Build from {dog_id: [label sequence, ...]} (tests, ad hoc data)."""
        sentences = []
        for dog_id, seqs in by_dog.items():
            for i, seq in enumerate(seqs):
                sentences.append(CorpusSentence(dog_id, tuple(int(x) for x in seq),
                                                sentence_id=f"{dog_id}#{i}"))
        return cls(sentences)

    @classmethod
    def from_transcripts(cls, transcripts: list[Transcript]) -> "Corpus":
        sentences = [
            CorpusSentence(
                t.dog_id, t.labels, sentence_id=t.sentence_id,
                run_frames=tuple(n for _, n in t.runs),
                frame_duration=t.frame_duration,
                noise_mask=(tuple(t.noise_flags)
                            if t.noise_flags is not None else None),
            )
            for t in transcripts if t.runs
        ]
        return cls(sentences)


@dataclass(frozen=True)
class NGramStat:
    """Popularity accounting for one unique n-gram.

    f is the relative frequency within grams of the same order, delta the
    distinct-dog count, and ps = f * delta the popularity score.
    """

    ngram: tuple[int, ...]
    count: int
    f: float
    delta: int
    ps: float

    @property
    def n(self) -> int:
        return len(self.ngram)


@dataclass
class Vocabulary:
    """Selected words sorted by (order desc, popularity desc)."""

    words: list[NGramStat]
    threshold: float

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "words": [
                {"ngram": list(w.ngram), "count": w.count, "f": w.f,
                 "delta": w.delta, "ps": w.ps}
                for w in self.words
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        words = [
            NGramStat(tuple(w["ngram"]), w["count"], w["f"], w["delta"], w["ps"])
            for w in d["words"]
        ]
        return cls(words, d["threshold"])


class MatchSpan(NamedTuple):
    """A vocabulary word matched over run positions [start, end)."""

    ngram: tuple[int, ...]
    start: int
    end: int


@dataclass
class CoverageReport:
    phoneme_coverage: float
    phone_coverage: float
    sentence_matches: list[list[MatchSpan]] = field(default_factory=list)


def enumerate_ngrams(corpus: Corpus, n: int) -> list[NGramOccurrence]:
    """All length-n windows over every sentence, with their positions."""
    if n < 1:
        raise ValueError("n must be >= 1")
    occurrences = []
    for si, sent in enumerate(corpus.sentences):
        seq = sent.labels
        for i in range(len(seq) - n + 1):
            occurrences.append(NGramOccurrence(seq[i:i + n], si, i))
    return occurrences


def score_ngrams(corpus: Corpus, n_min: int = 2, n_max: int = 6,
                 exclude_noise: bool = False) -> dict[tuple[int, ...], NGramStat]:
    """Count, frequency, diversity and popularity for every n-gram.

    Frequencies normalize within each order independently; delta counts
    the distinct dogs with at least one occurrence. With exclude_noise,
    windows touching a noise-flagged position are not counted at all, so
    frequencies renormalize over the remaining windows.
    """
    if n_min > n_max:
        raise ValueError("n_min must be <= n_max")
    if not corpus.sentences:
        raise ValueError("empty corpus")
    stats: dict[tuple[int, ...], NGramStat] = {}
    for n in range(n_min, n_max + 1):
        counts: Counter = Counter()
        dogs: defaultdict = defaultdict(set)
        for sent in corpus.sentences:
            seq = sent.labels
            mask = sent.noise_mask if exclude_noise else None
            for i in range(len(seq) - n + 1):
                if mask is not None and any(mask[i:i + n]):
                    continue
                gram = seq[i:i + n]
                counts[gram] += 1
                dogs[gram].add(sent.dog_id)
        total = sum(counts.values())
        for gram, count in counts.items():
            f = count / total
            delta = len(dogs[gram])
            stats[gram] = NGramStat(gram, count, f, delta, f * delta)
    return stats


def contains_contiguous(longer: tuple[int, ...], shorter: tuple[int, ...]) -> bool:
    """True when shorter appears as a contiguous window of longer."""
    n, m = len(longer), len(shorter)
    if m > n:
        return False
    return any(longer[i:i + m] == shorter for i in range(n - m + 1))


def build_vocabulary(stats: dict[tuple[int, ...], NGramStat], threshold: float,
                     n_max: int = 6, n_min: int = 2) -> Vocabulary:
    """Select words with ps >= threshold, longest order first.

    A gram is skipped when it is a contiguous subsequence of any word
    already selected at a longer order.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    selected: list[NGramStat] = []
    for n in range(n_max, n_min - 1, -1):
        candidates = [s for s in stats.values() if s.n == n and s.ps >= threshold]
        candidates.sort(key=lambda s: (-s.ps, s.ngram))
        for cand in candidates:
            if any(contains_contiguous(w.ngram, cand.ngram) for w in selected):
                continue
            selected.append(cand)
    selected.sort(key=lambda s: (-s.n, -s.ps, s.ngram))
    return Vocabulary(selected, threshold)


def match_words(labels: tuple[int, ...], words: list[NGramStat]) -> list[MatchSpan]:
    """Greedy longest-first, leftmost, non-overlapping word matching.

    The same matcher backs both corpus coverage and transcript display,
    so highlighted spans and coverage statistics agree.
    """
    ordered = sorted(words, key=lambda w: (-w.n, -w.ps, w.ngram))
    matches = []
    i = 0
    n = len(labels)
    while i < n:
        hit = None
        for w in ordered:
            m = w.n
            if i + m <= n and labels[i:i + m] == w.ngram:
                hit = w
                break
        if hit is None:
            i += 1
        else:
            matches.append(MatchSpan(hit.ngram, i, i + hit.n))
            i += hit.n
    return matches


def coverage(corpus: Corpus, vocab: Vocabulary) -> CoverageReport:
    """Fraction of positions (phoneme) and duration (phone) inside words."""
    covered_pos = total_pos = 0
    covered_dur = total_dur = 0.0
    all_matches = []
    for sent in corpus.sentences:
        matches = match_words(sent.labels, vocab.words)
        all_matches.append(matches)
        weights = [sent.position_weight(i) for i in range(len(sent.labels))]
        total_pos += len(sent.labels)
        total_dur += sum(weights)
        for m in matches:
            covered_pos += m.end - m.start
            covered_dur += sum(weights[m.start:m.end])
    return CoverageReport(
        covered_pos / total_pos if total_pos else 0.0,
        covered_dur / total_dur if total_dur else 0.0,
        all_matches,
    )


def threshold_sweep(stats: dict[tuple[int, ...], NGramStat], corpus: Corpus,
                    thresholds, n_max: int = 6,
                    n_min: int = 2) -> list[tuple[float, float, float]]:
    """(threshold, phoneme coverage, phone coverage) per threshold."""
    thresholds = [float(t) for t in thresholds]
    if thresholds != sorted(thresholds):
        raise ValueError("thresholds must be ascending")
    out = []
    for t in thresholds:
        vocab = build_vocabulary(stats, t, n_max=n_max, n_min=n_min)
        rep = coverage(corpus, vocab)
        out.append((t, rep.phoneme_coverage, rep.phone_coverage))
    return out


def find_knee(sweep: list[tuple[float, float, float]]) -> float:
    """Threshold at the knee of the phone-coverage curve.

    Both axes are min-max normalized, then the knee is the point with the
    greatest distance *above* the chord joining the curve's endpoints —
    the largest threshold still on the high-coverage shoulder. If no
    point rises above the chord (smooth convex decay), the point farthest
    from the chord on either side is used instead.
    """
    if not sweep:
        raise ValueError("empty sweep")
    if len(sweep) == 1:
        return sweep[0][0]
    ts = [p[0] for p in sweep]
    cs = [p[2] for p in sweep]
    t_span = ts[-1] - ts[0] or 1.0
    c_span = max(cs) - min(cs)
    if c_span < 1e-12:
        return ts[0]
    xs = [(t - ts[0]) / t_span for t in ts]
    ys = [(c - min(cs)) / c_span for c in cs]
    x0, y0, x1, y1 = xs[0], ys[0], xs[-1], ys[-1]
    chord = ((x1 - x0) ** 2 + (y1 - y0) ** 2) ** 0.5 or 1.0
    # signed distance: positive when the curve lies above the chord
    signed = [-((x1 - x0) * (y0 - y) - (x0 - x) * (y1 - y0)) / chord
              for x, y in zip(xs, ys)]
    best_i = max(range(len(signed)), key=lambda i: signed[i])
    if signed[best_i] <= 1e-12:
        best_i = max(range(len(signed)), key=lambda i: abs(signed[i]))
    return ts[best_i]


def save_vocabulary(path, vocab: Vocabulary) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(vocab.to_dict(), fh, indent=2)


def load_vocabulary(path) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        return Vocabulary.from_dict(json.load(fh))
