"""Empirical mode decomposition and its noise-assisted ensemble variant.

Sifting uses natural cubic spline envelopes through the local extrema,
with up to two extrema mirrored past each end of the signal to tame the
splines at the boundaries. A candidate is accepted as an IMF when the
variance-normalized change between successive siftings drops below the
threshold or the sifting cap is reached.

The residual of every decomposition is defined as the remainder
signal - sum(imfs), which makes the reconstruction identity exact by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = ["SiftConfig", "ImfSet", "emd", "iceemdan"]


@dataclass(frozen=True)
class SiftConfig:
    """Sifting stop rule: SD threshold between siftings, iteration caps."""

    sd_threshold: float = 0.2
    max_siftings: int = 10
    max_imfs: int | None = None

    def __post_init__(self):
        if self.sd_threshold <= 0:
            raise ValueError(f"sd_threshold must be > 0, got {self.sd_threshold}")
        if self.max_siftings < 1:
            raise ValueError(f"max_siftings must be >= 1, got {self.max_siftings}")
        if self.max_imfs is not None and self.max_imfs < 0:
            raise ValueError(f"max_imfs must be >= 0, got {self.max_imfs}")


@dataclass(frozen=True)
class ImfSet:
    """Ordered IMFs plus the remainder residual."""

    imfs: tuple
    residual: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """sum(imfs) + residual, the decomposed signal."""
        return imf_sum(self.imfs, self.residual.size) + self.residual


def imf_sum(imfs, length: int) -> np.ndarray:
    if not imfs:
        return np.zeros(length)
    return np.sum(np.stack(imfs), axis=0)


def _extrema_indices(x: np.ndarray):
    """Indices of local maxima and minima; plateaus count once at their end."""
    dx = np.diff(x)
    s = np.sign(dx)
    nz = s != 0
    if not nz.any():
        empty = np.empty(0, dtype=int)
        return empty, empty
    pos = np.where(nz, np.arange(s.size), -1)
    pos = np.maximum.accumulate(pos)
    filled = np.where(pos >= 0, s[np.maximum(pos, 0)], 0.0)
    ds = np.diff(filled)
    maxima = np.nonzero(ds < 0)[0] + 1
    minima = np.nonzero(ds > 0)[0] + 1
    return maxima, minima


def _envelope(idx: np.ndarray, val: np.ndarray, n: int) -> np.ndarray:
    """Natural cubic spline through the extrema, mirrored past both ends."""
    k = min(2, idx.size)
    xs = [float(i) for i in idx]
    ys = [float(v) for v in val]
    for j in range(k):
        if idx[j] > 0:
            xs.append(float(-idx[j]))
            ys.append(float(val[j]))
    for j in range(k):
        src = idx.size - 1 - j
        if idx[src] < n - 1:
            xs.append(float(2 * (n - 1) - idx[src]))
            ys.append(float(val[src]))
    order = np.argsort(xs)
    xs = np.asarray(xs)[order]
    ys = np.asarray(ys)[order]
    spline = CubicSpline(xs, ys, bc_type="natural")
    return spline(np.arange(n, dtype=float))


def _sift_once(h: np.ndarray):
    maxima, minima = _extrema_indices(h)
    if maxima.size < 2 or minima.size < 2:
        return None
    upper = _envelope(maxima, h[maxima], h.size)
    lower = _envelope(minima, h[minima], h.size)
    return h - 0.5 * (upper + lower)


def emd(signal, cfg: SiftConfig | None = None) -> ImfSet:
    """Decompose a signal into IMFs by sifting.

    A signal with fewer than four extrema is returned whole as the
    residual with zero IMFs.
    """
    cfg = cfg or SiftConfig()
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise ValueError("signal must be 1-D")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite values")

    imfs = []
    residual = x.copy()
    while cfg.max_imfs is None or len(imfs) < cfg.max_imfs:
        maxima, minima = _extrema_indices(residual)
        if maxima.size < 2 or minima.size < 2 or maxima.size + minima.size < 4:
            break
        h = residual
        for _ in range(cfg.max_siftings):
            h_new = _sift_once(h)
            if h_new is None:
                break
            denom = float(np.sum(h * h))
            sd = float(np.sum((h - h_new) ** 2)) / denom if denom > 0 else 0.0
            h = h_new
            if sd < cfg.sd_threshold:
                break
        imfs.append(h)
        residual = residual - h
    residual = x - imf_sum(imfs, x.size)
    return ImfSet(tuple(imfs), residual)


def iceemdan(signal, ensemble_n: int, noise_amp: float, seed, cfg: SiftConfig | None = None) -> ImfSet:
    """Noise-assisted EMD with ensemble averaging.

    Each realization adds seeded white noise scaled by
    noise_amp * std(signal), is decomposed by plain EMD, and the i-th IMFs
    are averaged across the ensemble (runs that produced fewer IMFs
    contribute zeros). noise_amp = 0 degenerates to a single emd() call.
    Deterministic for a fixed seed: each realization draws from its own
    spawned child stream, so results are schedule-independent.
    """
    if ensemble_n < 1:
        raise ValueError(f"ensemble_n must be >= 1, got {ensemble_n}")
    if noise_amp < 0:
        raise ValueError(f"noise_amp must be >= 0, got {noise_amp}")
    cfg = cfg or SiftConfig()
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise ValueError("signal must be 1-D")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite values")

    sigma = noise_amp * float(np.std(x))
    if sigma == 0.0:
        return emd(x, cfg)

    if isinstance(seed, np.random.SeedSequence):
        root = seed
    else:
        root = np.random.SeedSequence(seed)
    children = root.spawn(ensemble_n)

    runs = []
    for child in children:
        rng = np.random.default_rng(child)
        noisy = x + sigma * rng.standard_normal(x.size)
        runs.append(emd(noisy, cfg).imfs)

    k_max = max(len(r) for r in runs)
    if k_max == 0:
        return ImfSet((), x.copy())
    acc = np.zeros((k_max, x.size))
    for r in runs:
        for i, imf in enumerate(r):
            acc[i] += imf
    acc /= ensemble_n
    imfs = tuple(acc[i] for i in range(k_max))
    residual = x - imf_sum(imfs, x.size)
    return ImfSet(imfs, residual)
