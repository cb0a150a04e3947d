"""Complexity-driven recombination into high/mid/low frequency bands,
and the full multi-frequency extraction pipeline.

Components are grouped by a deterministic 1-D k-means (k=3) over their
complexity scores, initialized at the min/median/max score. The group
with the highest centroid becomes the high band; band series are
element-wise sums accumulated left to right over the component list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .emd import SiftConfig, iceemdan
from .entropy import msse_curve
from .vmd import VmdConfig, sum_components, vmd

__all__ = [
    "BandSet",
    "DecomposeConfig",
    "band_recombine",
    "multi_frequency_pipeline",
]

_BAND_NAMES = ("low", "mid", "high")


@dataclass(frozen=True)
class BandSet:
    """The three recombined band series plus the component→band record."""

    high: np.ndarray
    mid: np.ndarray
    low: np.ndarray
    membership: tuple

    def total(self) -> np.ndarray:
        return self.high + self.mid + self.low


@dataclass(frozen=True)
class DecomposeConfig:
    """Bundle of sub-configs for the multi-frequency pipeline."""

    vmd: VmdConfig = field(default_factory=VmdConfig)
    sift: SiftConfig = field(default_factory=SiftConfig)
    ensemble_n: int = 100
    noise_amp: float = 0.2
    m: int = 2
    r_frac: float = 0.15
    tau_max: int = 5


def _kmeans3(scores: np.ndarray) -> np.ndarray:
    """1-D k-means with centroids seeded at min/median/max.

    Returns per-score labels 0/1/2 ordered so that label 0 has the lowest
    final centroid and label 2 the highest. Assignment ties go to the
    lower cluster index; empty clusters keep their previous centroid.
    """
    centroids = np.array(
        [float(np.min(scores)), float(np.median(scores)), float(np.max(scores))]
    )
    labels = None
    for _ in range(200):
        dist = np.abs(scores[:, None] - centroids[None, :])
        new_labels = np.argmin(dist, axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(3):
            members = scores[labels == j]
            if members.size:
                centroids[j] = members.mean()
    order = np.argsort(centroids, kind="stable")
    remap = np.empty(3, dtype=int)
    remap[order] = np.arange(3)
    return remap[labels]


def band_recombine(components, complexity) -> BandSet:
    """Partition components into high/mid/low bands by complexity score.

    Each component lands in exactly one band, so the three band series sum
    to the sum of all inputs. Expects at least three components and one
    finite complexity score per component (callers typically pass the mean
    of each component's multiscale entropy curve).
    """
    comps = [np.asarray(c, dtype=float) for c in components]
    if len(comps) < 3:
        raise ValueError(f"need at least 3 components, got {len(comps)}")
    length = comps[0].size
    if any(c.ndim != 1 or c.size != length for c in comps):
        raise ValueError("components must be 1-D arrays of equal length")
    scores = np.asarray(complexity, dtype=float)
    if scores.shape != (len(comps),):
        raise ValueError(
            f"need one complexity score per component, got {scores.shape}"
        )
    if not np.all(np.isfinite(scores)):
        raise ValueError("complexity scores must be finite")

    labels = _kmeans3(scores)
    sums = [np.zeros(length), np.zeros(length), np.zeros(length)]
    for comp, lab in zip(comps, labels):
        sums[lab] += comp
    membership = tuple(_BAND_NAMES[lab] for lab in labels)
    return BandSet(high=sums[2], mid=sums[1], low=sums[0], membership=membership)


def _complexity_scores(components, cfg: DecomposeConfig) -> np.ndarray:
    scores = np.array(
        [float(np.mean(msse_curve(c, cfg.m, cfg.r_frac, cfg.tau_max))) for c in components]
    )
    finite = scores[np.isfinite(scores)]
    if finite.size < scores.size:
        # entropy curves can hit the +inf no-match sentinel; rank such
        # components above everything measurable and keep k-means finite
        cap = (finite.max() if finite.size else 0.0) + 1.0
        scores = np.where(np.isfinite(scores), scores, cap)
    return scores


def multi_frequency_pipeline(signal, cfg: DecomposeConfig, seed, detail: bool = False):
    """Full multi-frequency extraction for one series.

    Steps: decompose with vmd, drop the highest-center-frequency mode to
    form the denoised signal, score the retained modes by mean multiscale
    entropy, replace the most complex mode by its ensemble-EMD
    sub-components (IMFs plus residual, in place), then recombine all
    components into high/mid/low bands.

    Returns (denoised, BandSet); with detail=True a third element carries
    the (component_id, series) pairs behind the bands.
    """
    modes = vmd(signal, cfg.vmd)
    if len(modes) < 2:
        raise ValueError("pipeline requires K >= 2 so the noise mode can be dropped")
    retained = modes[:-1]
    denoised = sum_components([m.samples for m in retained])

    mode_scores = _complexity_scores([m.samples for m in retained], cfg)
    target = int(np.argmax(mode_scores))
    sub = iceemdan(retained[target].samples, cfg.ensemble_n, cfg.noise_amp, seed, cfg.sift)

    components = []
    ids = []
    for i, mode in enumerate(retained):
        if i == target:
            for j, imf in enumerate(sub.imfs):
                components.append(imf)
                ids.append(f"mode{i}_sub{j}")
            components.append(sub.residual)
            ids.append(f"mode{i}_subres")
        else:
            components.append(mode.samples)
            ids.append(f"mode{i}")

    scores = _complexity_scores(components, cfg)
    bands = band_recombine(components, scores)
    if detail:
        return denoised, bands, tuple(zip(ids, components))
    return denoised, bands
