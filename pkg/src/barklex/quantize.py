"""K-means codebook over frame features: train, assign, inspect.

Training is plain Lloyd iteration with k-means++ seeding, restarted and
kept at minimal inertia. Seeding draws from an RNG stream keyed by
(seed, restart) over data in a canonical row order, so results do not
depend on the order frames were concatenated in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ASSIGN_CHUNK = 4096


@dataclass
class Codebook:
    """K-means centroids mapping frames to phoneme labels 0..k-1."""

    centroids: np.ndarray
    k: int
    seed: int
    inertia: float
    n_training_frames: int
    inertia_history: list[float] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.centroids = np.asarray(self.centroids, dtype=np.float64)
        if self.centroids.shape[0] != self.k:
            raise ValueError("centroid count must equal k")
        if not np.isfinite(self.centroids).all():
            raise ValueError("centroids must be finite")
        if self.inertia < 0:
            raise ValueError("inertia must be >= 0")

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "dim": self.dim,
            "seed": self.seed,
            "inertia": self.inertia,
            "n_training_frames": self.n_training_frames,
            "centroids": [float(v) for v in self.centroids.ravel()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Codebook":
        centroids = np.array(d["centroids"], dtype=np.float64).reshape(d["k"], d["dim"])
        return cls(centroids, d["k"], d["seed"], d["inertia"], d["n_training_frames"])


@dataclass
class LabelSequence:
    """Per-frame phoneme labels for one sentence."""

    labels: np.ndarray
    frame_duration: float
    sentence_id: str = ""
    dog_id: str = ""

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.labels)


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Chunk-free ||x - c||^2 via the expansion trick; may be tiny-negative."""
    d2 = (
        (points ** 2).sum(axis=1)[:, None]
        - 2.0 * points @ centroids.T
        + (centroids ** 2).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _assign(points: np.ndarray, centroids: np.ndarray):
    """Nearest-centroid labels and squared distances, chunked over rows."""
    n = points.shape[0]
    labels = np.empty(n, dtype=np.int64)
    dists = np.empty(n)
    for lo in range(0, n, ASSIGN_CHUNK):
        hi = min(lo + ASSIGN_CHUNK, n)
        d2 = _squared_distances(points[lo:hi], centroids)
        labels[lo:hi] = np.argmin(d2, axis=1)
        dists[lo:hi] = d2[np.arange(hi - lo), labels[lo:hi]]
    return labels, dists


def _canonical_order(points: np.ndarray) -> np.ndarray:
    """Row order independent of how the input was arranged."""
    return np.lexsort(points.T[::-1])


def _kmeans_plusplus(points_sorted: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ over canonically ordered data.

    Each draw consumes one uniform variate and selects through the
    cumulative weight over the sorted rows, so a permutation of the
    original data selects identical centroid coordinates.
    """
    n = points_sorted.shape[0]
    centers = np.empty((k, points_sorted.shape[1]))
    first = min(int(rng.random() * n), n - 1)
    centers[0] = points_sorted[first]
    if k == 1:
        return centers
    d2 = _squared_distances(points_sorted, centers[:1]).ravel()
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # all remaining points coincide with chosen centers
            centers[j:] = centers[0]
            return centers
        u = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(d2), u, side="right"))
        idx = min(idx, n - 1)
        centers[j] = points_sorted[idx]
        d2 = np.minimum(d2, _squared_distances(points_sorted, centers[j:j + 1]).ravel())
    return centers


def _lloyd(points: np.ndarray, centers: np.ndarray, max_iters: int, rel_tol: float):
    """Lloyd iterations; returns (centers, inertia, per-iteration inertias)."""
    k = centers.shape[0]
    history = []
    prev = None
    for _ in range(max_iters):
        labels, dists = _assign(points, centers)
        # re-seed empty clusters to the globally farthest point
        for j in range(k):
            if not np.any(labels == j):
                far = int(np.argmax(dists))
                centers = centers.copy()
                centers[j] = points[far]
                labels[far] = j
                dists[far] = 0.0
        inertia = float(dists.sum())
        if prev is not None and inertia > prev * (1.0 + 1e-12) + 1e-12:
            raise AssertionError(f"inertia increased: {prev} -> {inertia}")
        history.append(inertia)
        if prev is not None:
            if prev == 0.0 or (prev - inertia) / prev < rel_tol:
                break
        prev = inertia
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, points)
        counts = np.bincount(labels, minlength=k).astype(np.float64)
        centers = sums / counts[:, None]
    return centers, history[-1], history


def train_codebook(features: np.ndarray, k: int, seed: int = 0,
                   restarts: int = 10, max_iters: int = 300,
                   rel_tol: float = 1e-6) -> Codebook:
    """Fit a k-cluster codebook, keeping the best of several restarts.

    Args:
        features: n_frames x dim matrix (concatenate sentences first).
        k: cluster count.
        seed: base seed; restart r draws from an RNG keyed by (seed, r).
        restarts: independent k-means++ initializations.
    """
    points = np.asarray(features, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("features must be a 2-D matrix")
    if not np.isfinite(points).all():
        raise ValueError("features must be finite")
    n = points.shape[0]
    if n < k:
        raise ValueError(f"need at least k={k} frames, got {n}")
    if k < 1:
        raise ValueError("k must be >= 1")

    points_sorted = points[_canonical_order(points)]
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        init = _kmeans_plusplus(points_sorted, k, rng)
        centers, inertia, history = _lloyd(points, init, max_iters, rel_tol)
        if best is None or inertia < best[1]:
            best = (centers, inertia, history)
    centers, inertia, history = best
    return Codebook(centers, k, seed, inertia, n, inertia_history=history)


def assign_labels(features, codebook: Codebook, frame_duration: float | None = None,
                  sentence_id: str = "", dog_id: str = "") -> LabelSequence:
    """Map each frame to its nearest centroid (ties: lowest index)."""
    from .audio import FrameFeatures

    if isinstance(features, FrameFeatures):
        matrix = features.matrix
        if frame_duration is None:
            frame_duration = features.frame_duration
    else:
        matrix = np.asarray(features, dtype=np.float64)
        if frame_duration is None:
            frame_duration = 0.02
    if matrix.shape[1] != codebook.dim:
        raise ValueError(f"feature dim {matrix.shape[1]} != codebook dim {codebook.dim}")
    labels, _ = _assign(matrix, codebook.centroids)
    return LabelSequence(labels, frame_duration, sentence_id=sentence_id, dog_id=dog_id)


def inertia_scan(features: np.ndarray, ks, seed: int = 0,
                 restarts: int = 10) -> list[tuple[int, float]]:
    """Train one codebook per k and report (k, inertia) pairs.

    Inertia is non-increasing in k on the same data; an apparent increase
    is retried with more restarts before being treated as an error.
    """
    points = np.asarray(features, dtype=np.float64)
    ks = list(ks)
    if ks != sorted(ks):
        raise ValueError("ks must be ascending")
    if ks and max(ks) > points.shape[0]:
        raise ValueError("max(ks) exceeds the number of frames")
    inertias = {}
    for k in ks:
        inertias[k] = train_codebook(points, k, seed=seed, restarts=restarts).inertia
    for prev_k, k in zip(ks, ks[1:]):
        if inertias[k] > inertias[prev_k] * (1.0 + 1e-12):
            boosted = train_codebook(points, k, seed=seed, restarts=restarts * 3)
            inertias[k] = min(inertias[k], boosted.inertia)
            if inertias[k] > inertias[prev_k] * (1.0 + 1e-12):
                raise AssertionError(
                    f"inertia not monotone: k={prev_k} -> {inertias[prev_k]}, "
                    f"k={k} -> {inertias[k]}"
                )
    return [(k, inertias[k]) for k in ks]


def project_centroids_2d(codebook: Codebook) -> np.ndarray:
    """Project centroids onto their top-2 principal components (k x 2).

    Components are ordered by descending explained variance; each is
    sign-fixed so its largest-magnitude entry is positive.
    """
    if codebook.k < 2:
        raise ValueError("need at least 2 centroids for a 2-D projection")
    centered = codebook.centroids - codebook.centroids.mean(axis=0)
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:2]
    if comps.shape[0] < 2:  # dim == 1
        comps = np.vstack([comps, np.zeros_like(comps[0])])
    for i in range(2):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    return centered @ comps.T
