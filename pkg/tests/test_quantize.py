import json

import numpy as np
import pytest

from barklex.audio import FrameFeatures
from barklex.quantize import (Codebook, assign_labels, inertia_scan,
                              project_centroids_2d, train_codebook)


def two_blobs(n_per=50, seed=0, centers=((0.0, 0.0), (10.0, 10.0)), sigma=0.1):
    rng = np.random.default_rng(seed)
    parts = [c + sigma * rng.normal(size=(n_per, 2)) for c in np.array(centers)]
    return np.vstack(parts)


# ------------------------------------------------------------- training

def test_identical_points_k1():
    pts = np.tile([3.0, -1.0, 2.0], (20, 1))
    cb = train_codebook(pts, 1, seed=0, restarts=2)
    assert np.allclose(cb.centroids[0], [3.0, -1.0, 2.0])
    assert cb.inertia == pytest.approx(0.0, abs=1e-18)


def test_two_blob_centroids():
    pts = two_blobs()
    cb = train_codebook(pts, 2, seed=0, restarts=3)
    got = cb.centroids[np.argsort(cb.centroids[:, 0])]
    assert np.linalg.norm(got[0] - pts[:50].mean(axis=0)) < 0.1
    assert np.linalg.norm(got[1] - pts[50:].mean(axis=0)) < 0.1


def test_k_equals_n_distinct_points():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(7, 3))
    cb = train_codebook(pts, 7, seed=0, restarts=5)
    assert cb.inertia == pytest.approx(0.0, abs=1e-12)
    got = set(map(tuple, np.round(cb.centroids, 9)))
    want = set(map(tuple, np.round(pts, 9)))
    assert got == want


def test_train_input_validation():
    with pytest.raises(ValueError):
        train_codebook(np.ones((3, 2)), 5)
    with pytest.raises(ValueError):
        train_codebook(np.array([[np.nan, 1.0]]), 1)
    with pytest.raises(ValueError):
        train_codebook(np.ones(6), 2)  # not 2-D


def test_training_deterministic():
    pts = np.random.default_rng(2).normal(size=(120, 4))
    a = train_codebook(pts, 6, seed=9, restarts=3)
    b = train_codebook(pts, 6, seed=9, restarts=3)
    assert np.array_equal(a.centroids, b.centroids)
    assert a.inertia == b.inertia


def test_inertia_monotone_within_restart():
    # the trainer asserts monotonicity internally; exercise it broadly and
    # double-check the recorded history of the winning restart
    rng = np.random.default_rng(0)
    for trial in range(100):
        n = int(rng.integers(20, 120))
        d = int(rng.integers(1, 6))
        k = int(rng.integers(1, min(9, n)))
        pts = rng.normal(size=(n, d)) * rng.uniform(0.5, 3.0)
        cb = train_codebook(pts, k, seed=trial, restarts=2)
        hist = cb.inertia_history
        assert all(b <= a * (1 + 1e-12) + 1e-12 for a, b in zip(hist, hist[1:]))


def test_permutation_invariance():
    rng = np.random.default_rng(21)
    pts = rng.normal(size=(200, 3))
    perm = rng.permutation(200)
    a = train_codebook(pts, 5, seed=4, restarts=3)
    b = train_codebook(pts[perm], 5, seed=4, restarts=3)
    assert b.inertia == pytest.approx(a.inertia, rel=1e-9)
    # greedy-match centroid sets
    used = set()
    for row in a.centroids:
        dists = np.linalg.norm(b.centroids - row, axis=1)
        order = [i for i in np.argsort(dists) if i not in used]
        assert dists[order[0]] < 1e-6
        used.add(order[0])


def test_empty_cluster_reseeded():
    # k=3 over two far clusters forces an empty cluster during Lloyd for
    # some inits; regardless, every label must be populated at the end
    pts = two_blobs(n_per=30, seed=5)
    cb = train_codebook(pts, 3, seed=0, restarts=5)
    labels = assign_labels(pts, cb).labels
    assert set(labels.tolist()) == {0, 1, 2}


# ------------------------------------------------------------- assignment

def test_assign_identity_and_ties():
    cb = Codebook(np.array([[0.0, 0.0], [2.0, 0.0], [4.0, 0.0]]), 3, 0, 0.0, 3)
    labels = assign_labels(np.array([[2.0, 0.0]]), cb).labels
    assert labels[0] == 1
    # equidistant from centroids 0 and 1 -> lowest index wins
    labels = assign_labels(np.array([[1.0, 0.0]]), cb).labels
    assert labels[0] == 0


def test_assign_matches_brute_force():
    rng = np.random.default_rng(8)
    pts = rng.normal(size=(10_000, 6))
    cb = Codebook(rng.normal(size=(17, 6)), 17, 0, 0.0, 17)
    fast = assign_labels(pts, cb).labels
    brute = np.array([
        int(np.argmin(((cb.centroids - p) ** 2).sum(axis=1))) for p in pts
    ])
    assert np.array_equal(fast, brute)


def test_assign_dim_mismatch():
    cb = Codebook(np.zeros((2, 3)), 2, 0, 0.0, 2)
    with pytest.raises(ValueError):
        assign_labels(np.zeros((4, 2)), cb)


def test_assign_takes_frame_features():
    feats = FrameFeatures(np.zeros((5, 2)), 0.04, 0.04)
    cb = Codebook(np.array([[0.0, 0.0], [9.0, 9.0]]), 2, 0, 0.0, 2)
    seq = assign_labels(feats, cb, sentence_id="s1", dog_id="d1")
    assert seq.frame_duration == 0.04
    assert seq.sentence_id == "s1"
    assert np.all(seq.labels == 0)


# ------------------------------------------------------------- inertia scan

def test_scan_k1_equals_total_scatter():
    rng = np.random.default_rng(12)
    pts = rng.normal(size=(300, 4))
    scan = inertia_scan(pts, [1], seed=0, restarts=2)
    scatter = float(((pts - pts.mean(axis=0)) ** 2).sum())
    assert scan[0][1] == pytest.approx(scatter, rel=1e-9)


def test_scan_kn_zero_for_distinct_points():
    rng = np.random.default_rng(13)
    pts = rng.normal(size=(12, 2))
    scan = inertia_scan(pts, [12], seed=0, restarts=4)
    assert scan[0][1] == pytest.approx(0.0, abs=1e-12)


def test_scan_monotone_two_blob_elbow():
    pts = two_blobs(n_per=40, seed=3)
    scan = inertia_scan(pts, list(range(1, 11)), seed=0, restarts=4)
    inertias = [v for _, v in scan]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(inertias, inertias[1:]))
    # elbow: huge drop 1->2, small drop 2->3
    assert inertias[0] - inertias[1] > 10 * (inertias[1] - inertias[2])


def test_scan_validates_ks():
    pts = np.zeros((5, 2))
    with pytest.raises(ValueError):
        inertia_scan(pts, [3, 2])
    with pytest.raises(ValueError):
        inertia_scan(pts, [6])


# ------------------------------------------------------------- persistence

def test_codebook_json_round_trip():
    rng = np.random.default_rng(30)
    cb = train_codebook(rng.normal(size=(60, 5)), 4, seed=1, restarts=2)
    blob = json.dumps(cb.to_dict())
    back = Codebook.from_dict(json.loads(blob))
    assert np.array_equal(back.centroids, cb.centroids)
    assert back.k == cb.k and back.seed == cb.seed
    assert back.inertia == cb.inertia
    assert back.n_training_frames == cb.n_training_frames


def test_codebook_validation():
    with pytest.raises(ValueError):
        Codebook(np.zeros((3, 2)), 4, 0, 0.0, 3)
    with pytest.raises(ValueError):
        Codebook(np.array([[np.inf, 0.0]]), 1, 0, 0.0, 1)
    with pytest.raises(ValueError):
        Codebook(np.zeros((1, 2)), 1, 0, -1.0, 1)


# ------------------------------------------------------------- projection

def test_projection_identity_for_2d():
    rng = np.random.default_rng(40)
    cents = rng.normal(size=(8, 2))
    cents -= cents.mean(axis=0)
    cb = Codebook(cents, 8, 0, 1.0, 8)
    proj = project_centroids_2d(cb)
    d_in = np.linalg.norm(cents[:, None] - cents[None, :], axis=2)
    d_out = np.linalg.norm(proj[:, None] - proj[None, :], axis=2)
    assert np.max(np.abs(d_in - d_out)) < 1e-9


def test_projection_collinear_second_column_zero():
    line = np.outer(np.linspace(-2, 2, 6), [1.0, 2.0, -1.0])
    cb = Codebook(line, 6, 0, 1.0, 6)
    proj = project_centroids_2d(cb)
    assert np.max(np.abs(proj[:, 1])) < 1e-9


def test_projection_variance_matches_top_eigenvalues():
    rng = np.random.default_rng(41)
    cents = rng.normal(size=(10, 5)) * np.array([3.0, 2.0, 1.0, 0.5, 0.1])
    cb = Codebook(cents, 10, 0, 1.0, 10)
    proj = project_centroids_2d(cb)
    centered = cents - cents.mean(axis=0)
    eig = np.sort(np.linalg.eigvalsh(centered.T @ centered))[::-1]
    assert (proj ** 2).sum() == pytest.approx(eig[0] + eig[1], rel=1e-9)


def test_projection_sign_deterministic():
    rng = np.random.default_rng(42)
    cents = rng.normal(size=(6, 4))
    cb = Codebook(cents, 6, 0, 1.0, 6)
    a = project_centroids_2d(cb)
    b = project_centroids_2d(Codebook(cents.copy(), 6, 0, 1.0, 6))
    assert np.array_equal(a, b)


def test_projection_needs_two_centroids():
    with pytest.raises(ValueError):
        project_centroids_2d(Codebook(np.zeros((1, 3)), 1, 0, 0.0, 1))
