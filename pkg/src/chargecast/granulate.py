"""Fuzzy information granulation over non-overlapping windows.

Each window is summarized by a triangular granule (a, m, b) fitted as the
window minimum, median, and maximum. Granule cores can be step-hold
upsampled back to the original resolution to serve as coarse-scale
channels (daily and weekly by default for hourly data).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Granule",
    "GranuleSeries",
    "membership",
    "fig_granulate",
    "granule_channels",
    "DEFAULT_WINDOWS",
]

DEFAULT_WINDOWS = (24, 168)


@dataclass(frozen=True)
class Granule:
    """Triangular fuzzy set with support [a, b] and core m."""

    a: float
    m: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.m) and np.isfinite(self.b)):
            raise ValueError("granule parameters must be finite")
        if not (self.a <= self.m <= self.b):
            raise ValueError(f"need a <= m <= b, got ({self.a}, {self.m}, {self.b})")


@dataclass(frozen=True)
class GranuleSeries:
    """Granules for consecutive non-overlapping windows of a fixed size."""

    window: int
    granules: tuple

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        object.__setattr__(self, "granules", tuple(self.granules))

    def cores(self) -> np.ndarray:
        return np.array([g.m for g in self.granules])


def membership(x: float, g: Granule) -> float:
    """Triangular membership of x in g, a total function into [0, 1].

    A collapsed ramp (a = m or m = b) evaluates to 1 at x = m.
    """
    if x < g.a or x > g.b:
        return 0.0
    if x <= g.m:
        if g.m == g.a:
            return 1.0
        return (x - g.a) / (g.m - g.a)
    return (g.b - x) / (g.b - g.m)


def fig_granulate(series, window: int) -> GranuleSeries:
    """Fit one granule per non-overlapping window; trailing remainder dropped.

    The granule is (min, median, max) of the window; an even-length median
    is the mean of the two central order statistics.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be 1-D")
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if window > x.size:
        raise ValueError(f"window {window} exceeds series length {x.size}")
    count = x.size // window
    blocks = x[: count * window].reshape(count, window)
    granules = tuple(
        Granule(float(b.min()), float(np.median(b)), float(b.max())) for b in blocks
    )
    return GranuleSeries(window=window, granules=granules)


def granule_channels(series, windows=DEFAULT_WINDOWS, T: int | None = None) -> dict:
    """Step-hold channels of granule cores, one per window size.

    Each channel repeats the covering granule's core across that window's
    steps and holds the last core for steps past the final full window.
    Returns {window: array of length T} with T defaulting to the series
    length.
    """
    x = np.asarray(series, dtype=float)
    length = x.size if T is None else int(T)
    out = {}
    for window in windows:
        gs = fig_granulate(x, int(window))
        cores = gs.cores()
        channel = np.repeat(cores, window)
        if channel.size < length:
            pad = np.full(length - channel.size, cores[-1])
            channel = np.concatenate([channel, pad])
        out[int(window)] = channel[:length]
    return out
