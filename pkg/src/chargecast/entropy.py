"""Multiscale sample entropy.

Sample entropy follows the Richman-Moorman counting convention: the first
N - m starting positions supply templates of both length m and m + 1, the
match predicate is Chebyshev distance <= r, and self-matches are excluded.
The entropy is -ln(A/B) over ordered template pairs.
"""

from __future__ import annotations

import numpy as np

__all__ = ["coarse_grain", "sample_entropy", "msse_curve"]


def coarse_grain(series, tau: int) -> np.ndarray:
    """Average non-overlapping blocks of length tau; trailing remainder is dropped.

    Parameters
    ----------
    series : 1-D real array
    tau : scale factor, >= 1 and <= len(series)
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be 1-D")
    if tau < 1:
        raise ValueError(f"tau must be >= 1, got {tau}")
    if tau > x.size:
        raise ValueError(f"tau {tau} exceeds series length {x.size}")
    n = x.size // tau
    return x[: n * tau].reshape(n, tau).mean(axis=1)


def sample_entropy(series, m: int = 2, r: float = 0.0) -> float:
    """Sample entropy -ln(A/B) with absolute tolerance r.

    B counts ordered pairs of length-m templates within Chebyshev distance
    r, A the same for length m + 1. Returns +inf when no (m+1)-templates
    match (A = 0) and 0 when every m-match extends (A = B).

    Callers that want the conventional relative tolerance pass
    r = r_frac * std(series).
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be 1-D")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if x.size <= m + 1:
        raise ValueError(f"series length {x.size} must exceed m+1 = {m + 1}")
    n = x.size - m
    cheb = np.zeros((n, n))
    for lag in range(m):
        col = x[lag : lag + n]
        np.maximum(cheb, np.abs(col[:, None] - col[None, :]), out=cheb)
    b = int(np.count_nonzero(cheb <= r)) - n
    col = x[m : m + n]
    np.maximum(cheb, np.abs(col[:, None] - col[None, :]), out=cheb)
    a = int(np.count_nonzero(cheb <= r)) - n
    if a == 0:
        return float("inf")
    return float(-np.log(a / b))


def msse_curve(series, m: int = 2, r_frac: float = 0.15, tau_max: int = 5) -> np.ndarray:
    """Sample entropy of the coarse-grained series at scales 1..tau_max.

    The tolerance r = r_frac * std(series) is fixed from the original
    series across all scales, the standard multiscale convention.
    """
    x = np.asarray(series, dtype=float)
    if tau_max < 1:
        raise ValueError(f"tau_max must be >= 1, got {tau_max}")
    if x.size // tau_max <= m + 1:
        raise ValueError(
            f"series length {x.size} too short for tau_max={tau_max} with m={m}"
        )
    r = r_frac * float(np.std(x))
    return np.array(
        [sample_entropy(coarse_grain(x, tau), m, r) for tau in range(1, tau_max + 1)]
    )
