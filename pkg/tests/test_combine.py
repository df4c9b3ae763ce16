import numpy as np
import pytest

from barklex.combine import (DEFAULT_NOISE_LABELS, CombinerConfig, Transcript,
                             combine, from_runs, load_transcripts, mask_noise,
                             phoneme_length_stats, save_transcripts, to_runs,
                             transcript_from_dict, transcript_to_dict)
from barklex.quantize import LabelSequence


def seq(labels, fd=0.02):
    return LabelSequence(np.asarray(labels, dtype=np.int64), fd)


def smoothed(labels, tolerance=1):
    return combine(seq(labels), CombinerConfig(tolerance)).labels.tolist()


# ------------------------------------------------------------- combine

def test_published_assimilation_example():
    assert smoothed([27, 27, 27, 5, 27, 27]) == [27] * 6


def test_published_unchanged_example():
    # both middle runs are longer than the tolerance: nothing to absorb
    assert smoothed([1, 1, 2, 2, 1, 1], tolerance=1) == [1, 1, 2, 2, 1, 1]


def test_boundary_run_never_assimilated():
    assert smoothed([5]) == [5]
    assert smoothed([5, 7], tolerance=3) == [5, 7]
    assert smoothed([5, 7, 7, 7], tolerance=3) == [5, 7, 7, 7]


def test_differing_neighbors_not_assimilated():
    assert smoothed([1, 1, 9, 2, 2]) == [1, 1, 9, 2, 2]


def test_tolerance_two_absorbs_length_two():
    assert smoothed([4, 4, 6, 6, 4, 4], tolerance=2) == [4] * 6
    assert smoothed([4, 4, 6, 6, 4, 4], tolerance=1) == [4, 4, 6, 6, 4, 4]


def test_cascading_merges_reach_fixed_point():
    # inner merge enables an outer merge on the following pass
    assert smoothed([3, 3, 3, 8, 3, 9, 3, 3, 3], tolerance=1) == [3] * 9


def test_empty_sequence():
    assert smoothed([]) == []


def test_combine_properties_randomized():
    rng = np.random.default_rng(1234)
    cfgs = [CombinerConfig(t) for t in (0, 1, 2, 3)]
    for _ in range(1000):
        n = int(rng.integers(0, 51))
        labels = rng.integers(0, 6, size=n)
        s = seq(labels)
        for cfg in cfgs:
            out = combine(s, cfg)
            assert len(out) == n                       # length preserved
            again = combine(out, cfg)
            assert np.array_equal(again.labels, out.labels)   # idempotent
            runs_in = len(to_runs(s).runs)
            runs_out = len(to_runs(out).runs)
            assert runs_out <= runs_in                 # runs non-increasing
            assert set(out.labels.tolist()) <= set(labels.tolist())
            if cfg.tolerance == 0:
                assert np.array_equal(out.labels, labels)


def test_config_validation():
    with pytest.raises(ValueError):
        CombinerConfig(-1)


# ------------------------------------------------------------- run coding

def test_rle_examples():
    assert to_runs(seq([7, 7, 7, 2])).runs == [(7, 3), (2, 1)]
    assert to_runs(seq([])).runs == []


def test_rle_round_trip_random():
    rng = np.random.default_rng(77)
    for _ in range(200):
        labels = rng.integers(0, 9, size=int(rng.integers(0, 40)))
        t = to_runs(seq(labels))
        assert np.array_equal(from_runs(t).labels, labels)
        for (a, _), (b, _) in zip(t.runs, t.runs[1:]):
            assert a != b


def test_transcript_validation():
    with pytest.raises(ValueError):
        Transcript([(1, 2), (1, 3)], 0.02)
    with pytest.raises(ValueError):
        Transcript([(1, 0)], 0.02)
    t = Transcript([(1, 2), (2, 1), (9, 1)], 0.02)
    assert t.n_frames == 4
    assert t.labels == (1, 2, 9)
    assert t.duration == pytest.approx(0.08)


# ------------------------------------------------------------- statistics

def test_stats_hand_computed():
    t = Transcript([(4, 2), (9, 1), (4, 1), (9, 3)], 0.02)
    stats = {s.label: s for s in phoneme_length_stats([t])}
    # label 4 run durations: 0.04, 0.02 -> mean 0.03, pop var 0.0001
    assert stats[4].mean_length == pytest.approx(0.03)
    assert stats[4].var_length == pytest.approx(0.0001)
    assert stats[4].n_runs == 2
    assert stats[9].n_runs == 2


def test_stats_published_arithmetic():
    # durations [0.04, 0.02, 0.06]: mean 0.04, population variance 8/30000
    t = Transcript([(7, 2), (1, 1), (7, 1), (1, 1), (7, 3)], 0.02)
    stat = {s.label: s for s in phoneme_length_stats([t])}[7]
    assert stat.mean_length == pytest.approx(0.04)
    assert stat.var_length == pytest.approx(0.0002666666, rel=1e-5)


def test_stats_single_run_zero_variance():
    stats = phoneme_length_stats([Transcript([(3, 5)], 0.02)])
    assert stats[0].var_length == 0.0
    assert stats[0].mean_length == pytest.approx(0.1)


def test_stats_mixed_frame_duration_rejected():
    a = Transcript([(1, 1)], 0.02)
    b = Transcript([(1, 1)], 0.04)
    with pytest.raises(ValueError):
        phoneme_length_stats([a, b])


def test_stats_sorted_and_positive():
    rng = np.random.default_rng(50)
    labels = rng.integers(0, 12, size=400)
    stats = phoneme_length_stats([to_runs(seq(labels))])
    assert [s.label for s in stats] == sorted(s.label for s in stats)
    for s in stats:
        assert s.mean_length > 0
        assert s.var_length >= 0


# ------------------------------------------------------------- noise flags

def test_mask_noise_flags_runs():
    t = Transcript([(27, 3), (5, 1)], 0.02)
    flagged = mask_noise(t, frozenset({5}))
    assert flagged.noise_flags == [False, True]
    assert flagged.runs == t.runs  # nothing removed


def test_mask_noise_empty_set():
    t = Transcript([(27, 3), (5, 1)], 0.02)
    assert mask_noise(t, frozenset()).noise_flags == [False, False]


def test_default_noise_set_flags_exactly_members():
    runs = [(label, 1) for label in range(50)]
    t = Transcript(runs, 0.02)
    flagged = mask_noise(t, DEFAULT_NOISE_LABELS)
    got = {label for (label, _), f in zip(flagged.runs, flagged.noise_flags) if f}
    assert got == set(DEFAULT_NOISE_LABELS)
    assert DEFAULT_NOISE_LABELS == frozenset(
        {2, 3, 4, 5, 6, 8, 13, 15, 18, 19, 25, 35, 36, 38, 39, 45})


# ------------------------------------------------------------- persistence

def test_transcript_dict_shape():
    t = Transcript([(27, 3), (5, 1)], 0.02, "s1", "dogA")
    d = transcript_to_dict(t)
    assert d == {"sentence_id": "s1", "dog_id": "dogA",
                 "frame_duration": 0.02, "runs": [[27, 3], [5, 1]]}
    assert transcript_from_dict(d) == t


def test_ndjson_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(60)
    transcripts = []
    for i in range(20):
        labels = rng.integers(0, 8, size=int(rng.integers(1, 30)))
        t = to_runs(LabelSequence(labels, 0.02, f"s{i}", f"dog{i % 3}"))
        if i % 2:
            t = mask_noise(t, frozenset({2, 5}))
        transcripts.append(t)
    path = tmp_path / "t.ndjson"
    save_transcripts(path, transcripts)
    assert load_transcripts(path) == transcripts
    # byte-stable on rewrite
    first = path.read_bytes()
    save_transcripts(path, load_transcripts(path))
    assert path.read_bytes() == first
