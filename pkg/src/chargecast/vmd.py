"""Variational mode decomposition.

Extracts K band-limited modes by minimizing summed spectral bandwidth
subject to (exact or relaxed) reconstruction. The solver runs the
standard ADMM updates in the Fourier domain: a Wiener-filter mode update,
a power-weighted center-frequency update over the positive half spectrum,
and dual ascent on the reconstruction multiplier. The input is
mirror-extended by half its length on each side to suppress boundary
effects, and the extension is cropped off the returned modes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError

__all__ = ["VmdConfig", "Mode", "vmd", "vmd_denoise"]


@dataclass(frozen=True)
class VmdConfig:
    """Solver settings.

    K : mode count
    alpha : bandwidth penalty
    tau : ascent step for the reconstruction multiplier (0 disables it)
    tol : stop when the summed relative change of mode spectra drops below
    init : 0 = all center frequencies start at zero, 1 = uniformly spaced
    max_iter : iteration cap
    """

    K: int = 8
    alpha: float = 100.0
    tau: float = 0.0
    tol: float = 1e-7
    init: int = 1
    max_iter: int = 500

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if self.tol <= 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.init not in (0, 1):
            raise ValueError(f"unknown init scheme {self.init}; use 0 or 1")


@dataclass(frozen=True)
class Mode:
    """One extracted mode and its converged center frequency (cycles/sample)."""

    samples: np.ndarray
    center_freq: float

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise NumericError("mode extraction produced non-finite samples")
        if not (0.0 <= self.center_freq <= 0.5):
            raise ValueError(
                f"center frequency {self.center_freq} outside the Nyquist range [0, 0.5]"
            )
        object.__setattr__(self, "samples", arr)


def _mirror_extend(x: np.ndarray) -> tuple[np.ndarray, int]:
    n = x.size
    lpad = n // 2
    rpad = n - lpad
    left = x[:lpad][::-1]
    right = x[n - rpad :][::-1]
    return np.concatenate([left, x, right]), lpad


def vmd(signal, cfg: VmdConfig) -> list:
    """Decompose a signal into cfg.K modes, ordered by ascending center frequency."""
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise ValueError("signal must be 1-D")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite values")
    if x.size < 2 * cfg.K:
        raise ValueError(f"signal length {x.size} too short for K={cfg.K} modes")

    ext, lpad = _mirror_extend(x)
    n_ext = ext.size
    half = n_ext // 2
    freqs = np.arange(n_ext) / n_ext - 0.5

    f_hat = np.fft.fftshift(np.fft.fft(ext))
    f_plus = f_hat.copy()
    f_plus[:half] = 0.0

    if cfg.init == 1:
        omega = (0.5 / cfg.K) * np.arange(cfg.K)
    else:
        omega = np.zeros(cfg.K)

    u_hat = np.zeros((cfg.K, n_ext), dtype=complex)
    lam = np.zeros(n_ext, dtype=complex)
    pos = freqs[half:]

    for it in range(cfg.max_iter):
        u_prev = u_hat.copy()
        others = u_hat.sum(axis=0)
        for k in range(cfg.K):
            others -= u_hat[k]
            u_hat[k] = (f_plus - others + lam / 2.0) / (
                1.0 + 2.0 * cfg.alpha * (freqs - omega[k]) ** 2
            )
            power = np.abs(u_hat[k, half:]) ** 2
            total = power.sum()
            if total > 0.0:
                omega[k] = float((pos * power).sum() / total)
            others += u_hat[k]
        if cfg.tau > 0.0:
            lam = lam + cfg.tau * (f_plus - others)
        num = np.abs(u_hat - u_prev) ** 2
        den = (np.abs(u_prev) ** 2).sum(axis=1)
        if it > 0 and np.all(den > 0.0):
            change = float((num.sum(axis=1) / den).sum())
            if change < cfg.tol:
                break

    # rebuild two-sided spectra, invert, and crop the mirror extension
    full = np.zeros_like(u_hat)
    full[:, half:] = u_hat[:, half:]
    full[:, 1 : half + 1] = np.conj(u_hat[:, -1 : half - 1 : -1])
    full[:, 0] = np.conj(full[:, -1])
    time_modes = np.real(np.fft.ifft(np.fft.ifftshift(full, axes=1), axis=1))
    time_modes = time_modes[:, lpad : lpad + x.size]

    omega = np.clip(omega, 0.0, 0.5)
    order = np.argsort(omega, kind="stable")
    return [Mode(time_modes[k], float(omega[k])) for k in order]


def vmd_denoise(signal, cfg: VmdConfig) -> np.ndarray:
    """Sum of the K-1 modes with lowest center frequency.

    The discarded mode is the one with the largest converged center
    frequency, treated as high-frequency noise.
    """
    if cfg.K < 2:
        raise ValueError("denoising requires K >= 2 so one mode can be discarded")
    modes = vmd(signal, cfg)
    return sum_components([m.samples for m in modes[:-1]])


def sum_components(components) -> np.ndarray:
    """Left-to-right accumulation of equal-length arrays."""
    acc = np.array(components[0], dtype=float)
    for c in components[1:]:
        acc += c
    return acc
