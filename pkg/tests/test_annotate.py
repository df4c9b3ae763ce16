import base64
import dataclasses
from pathlib import Path

import numpy as np
import pytest

from barklex.annotate import extract_exemplars, resample_clip, transcribe
from barklex.audio import AudioClip, load_audio
from barklex.bundle import FeatureConfig
from barklex.combine import CombinerConfig, Transcript, combine, to_runs
from barklex.quantize import LabelSequence


def sentence_clips(model_out_dir, limit=6):
    paths = sorted((Path(model_out_dir) / "sentences").glob("*.wav"))
    assert paths, "trained pipeline should export sentence audio"
    return [load_audio(p) for p in paths[:limit]]


def test_transcribe_runs_agree_with_combiner(bundle, model_out_dir):
    clip = sentence_clips(model_out_dir, limit=1)[0]
    result = transcribe(clip, bundle)
    assert len(result.runs) > 0
    # independent oracle: smoothing the raw labels must reproduce the runs
    seq = LabelSequence(result.raw_labels, bundle.feature.frame_duration)
    expected = to_runs(combine(seq, bundle.combiner))
    assert [(r.label,) for r in result.runs] == [(l,) for l, _ in expected.runs]
    frames = [round((r.end - r.start) / result.frame_duration) for r in result.runs]
    assert frames == [n for _, n in expected.runs]


def test_transcribe_spans_are_contiguous(bundle, model_out_dir):
    for clip in sentence_clips(model_out_dir, limit=3):
        result = transcribe(clip, bundle)
        assert result.runs[0].start == 0.0
        for a, b in zip(result.runs, result.runs[1:]):
            assert b.start == pytest.approx(a.end)
        n_frames = len(result.raw_labels)
        assert result.runs[-1].end == pytest.approx(
            n_frames * bundle.feature.frame_duration)
        assert result.energy.values.shape[0] == n_frames
        assert result.spectrogram.shape[0] == n_frames


def test_transcribe_finds_word_in_corpus_sentence(bundle, model_out_dir):
    vocab_ngrams = {w.ngram for w in bundle.vocabulary.words}
    assert vocab_ngrams, "trained vocabulary should be non-empty"
    found = False
    for clip in sentence_clips(model_out_dir):
        result = transcribe(clip, bundle)
        for span in result.word_spans:
            assert span.ngram in vocab_ngrams
            labels = [r.label for r in result.runs[span.start_run:span.end_run]]
            assert tuple(labels) == span.ngram
            assert span.start == result.runs[span.start_run].start
            assert span.end == result.runs[span.end_run - 1].end
            found = True
        # greedy matches never overlap
        for a, b in zip(result.word_spans, result.word_spans[1:]):
            assert a.end_run <= b.start_run
    assert found, "no word span detected in any training sentence"


def test_transcribe_silence_is_structurally_valid(bundle):
    clip = AudioClip(np.zeros(16000), 16000, source_id="quiet")
    result = transcribe(clip, bundle)
    assert len(result.raw_labels) == 50
    assert sum(round((r.end - r.start) / 0.02) for r in result.runs) == 50


def test_transcribe_subframe_clip_is_empty(bundle):
    clip = AudioClip(np.zeros(100), 16000, source_id="tiny")
    result = transcribe(clip, bundle)
    assert result.runs == []
    assert result.word_spans == []
    assert result.raw_labels.size == 0


def test_transcribe_rejects_external_feature_kind(bundle):
    alien = dataclasses.replace(bundle, feature=FeatureConfig(kind="external"))
    clip = AudioClip(np.zeros(16000), 16000)
    with pytest.raises(ValueError, match="external"):
        transcribe(clip, alien)


def test_to_dict_payload_shape(bundle, model_out_dir):
    clip = sentence_clips(model_out_dir, limit=1)[0]
    payload = transcribe(clip, bundle).to_dict()
    assert set(payload) == {"sentence_id", "frame_duration", "runs", "word_spans",
                            "raw_labels", "energy", "spectrogram"}
    spec = payload["spectrogram"]
    raw = base64.b64decode(spec["data"])
    grid = np.frombuffer(raw, dtype="<f4")
    assert grid.size == spec["n_frames"] * spec["n_bins"]
    assert np.isfinite(grid).all()
    assert len(payload["raw_labels"]) == spec["n_frames"]
    for r in payload["runs"]:
        assert set(r) == {"label", "start", "end", "noise"}


def test_resample_same_rate_is_identity():
    clip = AudioClip(np.zeros(100), 16000)
    assert resample_clip(clip, 16000) is clip


def test_resample_preserves_duration_and_pitch():
    t = np.arange(8000) / 8000.0
    clip = AudioClip(0.5 * np.sin(2 * np.pi * 440 * t), 8000, source_id="tone")
    out = resample_clip(clip, 16000)
    assert out.sample_rate == 16000
    assert len(out.samples) == 16000
    spectrum = np.abs(np.fft.rfft(out.samples))
    assert abs(np.argmax(spectrum) - 440) <= 1


# ------------------------------------------------------------- exemplars

def test_exemplar_single_run_exact():
    t = Transcript([(3, 6)], 0.02, "s0", "a")
    out = extract_exemplars([t], 3)
    assert len(out) == 1
    ex = out[0]
    assert (ex.label, ex.sentence_id, ex.n_frames) == (3, "s0", 6)
    assert ex.start == 0.0
    assert ex.end == pytest.approx(0.12)


def test_exemplar_offsets_inside_sentence():
    t = Transcript([(1, 3), (3, 7), (1, 2)], 0.02, "s0", "a")
    out = extract_exemplars([t], 3)
    assert len(out) == 1
    assert out[0].start == pytest.approx(0.06)
    assert out[0].end == pytest.approx(0.20)


def test_exemplar_minimum_length():
    t = Transcript([(3, 4), (1, 1), (3, 5)], 0.02, "s0", "a")
    out = extract_exemplars([t], 3, min_frames=5)
    assert [e.n_frames for e in out] == [5]


def test_exemplar_absent_label_empty():
    t = Transcript([(1, 10)], 0.02, "s0", "a")
    assert extract_exemplars([t], 9) == []


def test_exemplar_sampling_seeded_and_ordered():
    transcripts = [Transcript([(4, 8)], 0.02, f"s{i}", "a") for i in range(30)]
    a = extract_exemplars(transcripts, 4, max_count=10, seed=0)
    b = extract_exemplars(transcripts, 4, max_count=10, seed=0)
    assert a == b
    assert len(a) == 10
    ids = [e.sentence_id for e in a]
    order = [int(s[1:]) for s in ids]
    assert order == sorted(order)
    assert set(ids) <= {f"s{i}" for i in range(30)}


def test_exemplar_small_pool_returned_whole():
    transcripts = [Transcript([(4, 8)], 0.02, f"s{i}", "a") for i in range(3)]
    out = extract_exemplars(transcripts, 4, max_count=10)
    assert len(out) == 3
