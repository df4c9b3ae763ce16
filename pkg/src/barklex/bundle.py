"""Persisted model bundle: everything annotation and serving need.

One JSON file holds the feature configuration, codebook, combiner
settings, noise labels, vocabulary, per-phoneme statistics and
provenance, protected by a content checksum.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .combine import CombinerConfig, PhonemeStat
from .mine import Vocabulary
from .quantize import Codebook

BUNDLE_VERSION = 1


class BundleError(Exception):
    """Raised on unreadable, unversioned or corrupted bundles."""


@dataclass(frozen=True)
class FeatureConfig:
    """Feature-extraction settings frozen into a trained bundle."""

    kind: str = "logmel"
    sample_rate: int = 16000
    n_mels: int = 40
    frame_duration: float = 0.02
    hop: float = 0.02

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sample_rate": self.sample_rate,
                "n_mels": self.n_mels, "frame_duration": self.frame_duration,
                "hop": self.hop}

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        return cls(**d)


@dataclass
class ModelBundle:
    feature: FeatureConfig
    codebook: Codebook
    combiner: CombinerConfig
    noise_labels: frozenset[int]
    vocabulary: Vocabulary
    phoneme_stats: list[PhonemeStat]
    provenance: dict = field(default_factory=dict)
    version: int = BUNDLE_VERSION

    def __post_init__(self):
        self.noise_labels = frozenset(int(x) for x in self.noise_labels)
        bad = [x for x in self.noise_labels if not 0 <= x < self.codebook.k]
        if bad:
            raise BundleError(f"noise labels outside [0, k): {sorted(bad)}")

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "feature": self.feature.to_dict(),
            "codebook": self.codebook.to_dict(),
            "combiner": {"tolerance": self.combiner.tolerance},
            "noise_labels": sorted(self.noise_labels),
            "vocabulary": self.vocabulary.to_dict(),
            "phoneme_stats": [
                {"label": s.label, "mean_length": s.mean_length,
                 "var_length": s.var_length, "n_runs": s.n_runs}
                for s in self.phoneme_stats
            ],
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelBundle":
        if d.get("version") != BUNDLE_VERSION:
            raise BundleError(f"unknown bundle version {d.get('version')!r}")
        return cls(
            feature=FeatureConfig.from_dict(d["feature"]),
            codebook=Codebook.from_dict(d["codebook"]),
            combiner=CombinerConfig(d["combiner"]["tolerance"]),
            noise_labels=frozenset(d["noise_labels"]),
            vocabulary=Vocabulary.from_dict(d["vocabulary"]),
            phoneme_stats=[
                PhonemeStat(s["label"], s["mean_length"], s["var_length"], s["n_runs"])
                for s in d["phoneme_stats"]
            ],
            provenance=d.get("provenance", {}),
            version=d["version"],
        )


def _checksum(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def save_bundle(path, bundle: ModelBundle) -> None:
    payload = bundle.to_dict()
    payload["checksum"] = _checksum(bundle.to_dict())
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)


def load_bundle(path) -> ModelBundle:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise BundleError(f"unreadable bundle: {exc}") from exc
    stored = payload.pop("checksum", None)
    if stored is None:
        raise BundleError("bundle has no checksum")
    actual = _checksum(payload)
    if stored != actual:
        raise BundleError("checksum mismatch: bundle file is corrupted")
    return ModelBundle.from_dict(payload)
