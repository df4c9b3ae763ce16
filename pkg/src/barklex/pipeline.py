"""End-to-end pipeline: WAV directory in, trained model bundle out.

Stages: sentence segmentation, feature extraction, codebook training,
label assignment, run smoothing, statistics, vocabulary mining and a
coverage sweep. Every random choice flows from the single config seed,
so reruns on identical inputs reproduce the bundle byte for byte apart
from timestamps.
"""

from __future__ import annotations

import datetime
import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .audio import load_audio, load_embeddings, save_wav, stack_features
from .bundle import FeatureConfig, ModelBundle, save_bundle
from .combine import (CombinerConfig, combine, mask_noise, phoneme_length_stats,
                      save_transcripts, to_runs)
from .mine import (Corpus, build_vocabulary, coverage, find_knee, save_vocabulary,
                   score_ngrams, threshold_sweep)
from .quantize import assign_labels, inertia_scan, train_codebook
from .segment import (DEFAULT_DOG_LABELS, dynamic_threshold, energy_to_framewise,
                      extract_clips, filter_by_tags, merge_and_pad)


class PipelineError(Exception):
    """A stage failed; message carries the stage and offending input."""

    def __init__(self, stage: str, input_id: str, message: str):
        super().__init__(f"[{stage}] {input_id}: {message}")
        self.stage = stage
        self.input_id = input_id


@dataclass
class PipelineConfig:
    """All pipeline hyperparameters and paths in one place."""

    input_dir: str = "."
    out_dir: str = "out"
    sample_rate: int = 16000
    n_mels: int = 40
    frame_duration: float = 0.02
    hop: float = 0.02
    k: int = 50
    seed: int = 0
    restarts: int = 10
    tolerance: int = 1
    n_min: int = 2
    n_max: int = 6
    vocab_threshold: float | None = None
    sweep_start: float = 0.02
    sweep_stop: float = 1.0
    sweep_step: float = 0.02
    tag_threshold: float = 0.1
    gap_max: float = 1.0
    pad: float = 0.5
    min_sentence_duration: float = 0.1
    noise_labels: list[int] = field(default_factory=list)
    dog_labels: list[str] = field(default_factory=lambda: sorted(DEFAULT_DOG_LABELS))
    scores_dir: str | None = None
    tags_file: str | None = None
    embeddings_dir: str | None = None
    scan_ks: list[int] = field(default_factory=list)
    export_sentences: bool = True

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {f for f in cls().__dict__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class PipelineResult:
    bundle: ModelBundle
    transcripts: list
    sweep: list[tuple[float, float, float]]
    coverage_report: object
    scan: list[tuple[int, float]]
    bundle_path: Path


def _dog_id_from_name(stem: str) -> str:
    return stem.split("__", 1)[0]


def _load_tag_file(path) -> dict[str, dict[str, float]]:
    tags = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rec = json.loads(line)
                tags[rec["clip_id"]] = rec["tags"]
    return tags


def _sentence_spans(clip, config: PipelineConfig, scores=None):
    """Detector spans for one clip, via sidecar scores or energy fallback."""
    from .audio import compute_energy
    from .segment import FramewiseScore

    if scores is None:
        energy = compute_energy(clip, config.frame_duration, config.hop)
        if energy.values.size == 0:
            return []
        scores = energy_to_framewise(energy, clip.source_id)
    threshold = dynamic_threshold(scores)
    spans = extract_clips(scores, threshold)
    return merge_and_pad(spans, clip.duration, config.gap_max, config.pad)


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    """Execute all stages and persist the artifacts under out_dir."""
    input_dir = Path(config.input_dir)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    wavs = sorted(input_dir.glob("*.wav"))
    if not wavs:
        raise PipelineError("segment", str(input_dir), "no input clips")

    tag_map = _load_tag_file(config.tags_file) if config.tags_file else {}
    digest = hashlib.sha256()

    # stage 1: segmentation into sentences
    sentences = []  # (sentence_id, dog_id, clip)
    for wav in wavs:
        digest.update(wav.name.encode())
        digest.update(hashlib.sha256(wav.read_bytes()).digest())
        try:
            clip = load_audio(wav, working_rate=config.sample_rate,
                              dog_id=_dog_id_from_name(wav.stem))
        except Exception as exc:
            raise PipelineError("segment", wav.name, str(exc)) from exc
        scores = None
        if config.scores_dir:
            sidecar = Path(config.scores_dir) / (wav.stem + ".dgfv")
            if sidecar.exists():
                from .segment import FramewiseScore
                feats = load_embeddings(sidecar)
                scores = FramewiseScore(feats.matrix[:, 0], feats.hop, clip.source_id)
        if clip.source_id in tag_map:
            keep, _ = filter_by_tags(
                None, tag_map[clip.source_id],
                frozenset(config.dog_labels), config.tag_threshold)
            if not keep:
                continue
        for i, span in enumerate(_sentence_spans(clip, config, scores)):
            if span.duration < config.min_sentence_duration:
                continue
            lo = int(round(span.start * clip.sample_rate))
            hi = int(round(span.end * clip.sample_rate))
            sub = replace_samples(clip, clip.samples[lo:hi])
            sentence_id = f"{clip.source_id}#{i}"
            sentences.append((sentence_id, clip.dog_id, sub))
    if not sentences:
        raise PipelineError("segment", str(input_dir), "no sentences detected")

    # stage 2: features
    feature_cfg = FeatureConfig("logmel", config.sample_rate, config.n_mels,
                                config.frame_duration, config.hop)
    from .audio import compute_logmel

    feats = []
    for sentence_id, dog_id, clip in sentences:
        if config.embeddings_dir:
            path = Path(config.embeddings_dir) / (sentence_id + ".dgfv")
            if not path.exists():
                raise PipelineError("features", sentence_id, "missing embedding file")
            f = load_embeddings(path)
            feature_cfg = replace(feature_cfg, kind="external-embedding")
        else:
            f = compute_logmel(clip, config.n_mels, config.frame_duration, config.hop)
        if f.n_frames == 0:
            raise PipelineError("features", sentence_id, "sentence shorter than one frame")
        feats.append(f)

    # stage 3: codebook
    matrix = stack_features(feats)
    if matrix.shape[0] < config.k:
        raise PipelineError("quantize-train", "corpus",
                            f"{matrix.shape[0]} frames < k={config.k}")
    codebook = train_codebook(matrix, config.k, seed=config.seed,
                              restarts=config.restarts)
    scan = []
    if config.scan_ks:
        scan = inertia_scan(matrix, config.scan_ks, seed=config.seed,
                            restarts=config.restarts)

    # stage 4: assign + combine into transcripts
    combiner = CombinerConfig(config.tolerance)
    noise = frozenset(config.noise_labels)
    transcripts = []
    for (sentence_id, dog_id, clip), f in zip(sentences, feats):
        labels = assign_labels(f, codebook, sentence_id=sentence_id, dog_id=dog_id)
        transcripts.append(mask_noise(to_runs(combine(labels, combiner)), noise))

    stats_list = phoneme_length_stats(transcripts)

    # stage 5: mining and sweep
    corpus = Corpus.from_transcripts(transcripts)
    stats = score_ngrams(corpus, config.n_min, config.n_max)
    thresholds = np.arange(config.sweep_start,
                           config.sweep_stop + config.sweep_step / 2,
                           config.sweep_step)
    sweep = threshold_sweep(stats, corpus, [round(float(t), 10) for t in thresholds],
                            n_max=config.n_max, n_min=config.n_min)
    threshold = config.vocab_threshold
    if threshold is None:
        threshold = find_knee(sweep)
    vocabulary = build_vocabulary(stats, threshold, n_max=config.n_max,
                                  n_min=config.n_min)
    coverage_report = coverage(corpus, vocabulary)

    bundle = ModelBundle(
        feature=feature_cfg,
        codebook=codebook,
        combiner=combiner,
        noise_labels=noise,
        vocabulary=vocabulary,
        phoneme_stats=stats_list,
        provenance={
            "seed": config.seed,
            "corpus_digest": digest.hexdigest(),
            "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "tool_version": __version__,
            "n_sentences": len(sentences),
        },
    )

    # persist artifacts
    bundle_path = out_dir / "model.json"
    save_bundle(bundle_path, bundle)
    save_transcripts(out_dir / "transcripts.ndjson", transcripts)
    save_vocabulary(out_dir / "vocabulary.json", vocabulary)
    with open(out_dir / "coverage.json", "w", encoding="utf-8") as fh:
        json.dump({"threshold": threshold,
                   "phoneme_coverage": coverage_report.phoneme_coverage,
                   "phone_coverage": coverage_report.phone_coverage,
                   "sweep": [[t, pc, fc] for t, pc, fc in sweep]}, fh, indent=2)
    if scan:
        with open(out_dir / "inertia_scan.json", "w", encoding="utf-8") as fh:
            json.dump({"scan": [[k, v] for k, v in scan]}, fh, indent=2)
    if config.export_sentences:
        sdir = out_dir / "sentences"
        sdir.mkdir(exist_ok=True)
        for sentence_id, dog_id, clip in sentences:
            save_wav(sdir / (sentence_id.replace("/", "_") + ".wav"), clip)

    return PipelineResult(bundle, transcripts, sweep, coverage_report, scan,
                          bundle_path)


def replace_samples(clip, samples):
    from .audio import AudioClip

    return AudioClip(samples, clip.sample_rate, clip.source_id, clip.dog_id)
