"""Toolkit for discovering phoneme-like units and n-gram "words" in
animal vocalization corpora, with an annotation HTTP service on top."""

__version__ = "0.1.0"

from .audio import (AudioClip, AudioLoadError, EmbeddingFormatError, EnergyTrack,
                    FrameFeatures, compute_energy, compute_logmel,
                    compute_spectrogram, load_audio, load_embeddings, save_embeddings,
                    save_wav)
from .segment import (FramewiseScore, SentenceSpan, dynamic_threshold,
                      energy_to_framewise, extract_clips, filter_by_tags,
                      merge_and_pad)
from .quantize import (Codebook, LabelSequence, assign_labels, inertia_scan,
                       project_centroids_2d, train_codebook)
from .combine import (CombinerConfig, PhonemeStat, Transcript, combine, from_runs,
                      load_transcripts, mask_noise, phoneme_length_stats,
                      save_transcripts, to_runs)
from .mine import (Corpus, CorpusSentence, CoverageReport, NGramStat, Vocabulary,
                   build_vocabulary, coverage, find_knee, load_vocabulary,
                   match_words, score_ngrams, threshold_sweep)
from .bundle import BundleError, FeatureConfig, ModelBundle, load_bundle, save_bundle
from .annotate import (AnnotatedTranscript, PhonemeExemplar, RunSpan, WordSpan,
                       extract_exemplars, transcribe)
from .pipeline import PipelineConfig, PipelineError, PipelineResult, run_pipeline

__all__ = [
    "AudioClip", "AudioLoadError", "EmbeddingFormatError", "EnergyTrack",
    "FrameFeatures", "compute_energy", "compute_logmel", "compute_spectrogram",
    "load_audio", "load_embeddings", "save_embeddings", "save_wav",
    "FramewiseScore", "SentenceSpan", "dynamic_threshold", "energy_to_framewise",
    "extract_clips", "filter_by_tags", "merge_and_pad",
    "Codebook", "LabelSequence", "assign_labels", "inertia_scan",
    "project_centroids_2d", "train_codebook",
    "CombinerConfig", "PhonemeStat", "Transcript", "combine", "from_runs",
    "load_transcripts", "mask_noise", "phoneme_length_stats", "save_transcripts",
    "to_runs",
    "Corpus", "CorpusSentence", "CoverageReport", "NGramStat", "Vocabulary",
    "build_vocabulary", "coverage", "find_knee", "load_vocabulary", "match_words",
    "score_ngrams", "threshold_sweep",
    "BundleError", "FeatureConfig", "ModelBundle", "load_bundle", "save_bundle",
    "AnnotatedTranscript", "PhonemeExemplar", "RunSpan", "WordSpan",
    "extract_exemplars", "transcribe",
    "PipelineConfig", "PipelineError", "PipelineResult", "run_pipeline",
    "__version__",
]
