"""4-bit NormalFloat quantization with double-quantized scale constants.

Frozen weight matrices are stored as 4-bit indices into a 16-level codebook
whose levels are quantiles of a standard normal, rescaled so the extreme
levels sit exactly at -1 and +1. Each block of 64 values shares one absmax
scale; the absmax constants themselves are quantized to 8 bits per
superblock of 256 blocks to shave the constant overhead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

__all__ = ["NF4_CODEBOOK", "QuantizedTensor", "quantize", "dequantize"]

_QUANTILE_OFFSET = 0.9677083


def _build_codebook() -> np.ndarray:
    positive = norm.ppf(np.linspace(_QUANTILE_OFFSET, 0.5, 9))[:-1]
    negative = -norm.ppf(np.linspace(_QUANTILE_OFFSET, 0.5, 8))[:-1]
    levels = np.concatenate([positive, negative, [0.0]])
    levels = np.sort(levels)
    return levels / levels.max()


NF4_CODEBOOK = _build_codebook()
NF4_CODEBOOK.setflags(write=False)


@dataclass(frozen=True)
class QuantizedTensor:
    """4-bit codes plus the constants needed to reconstruct the values."""

    codes: np.ndarray  # uint8, one codebook index per element
    scale_codes: np.ndarray  # uint8, one 8-bit code per block
    scale_min: np.ndarray  # float64, per superblock
    scale_step: np.ndarray  # float64, per superblock
    shape: tuple
    block_size: int
    superblock: int

    @property
    def n_blocks(self) -> int:
        return self.scale_codes.shape[0]

    def block_scales(self) -> np.ndarray:
        """Dequantized absmax constant for each block."""
        sb = np.arange(self.n_blocks) // self.superblock
        return self.scale_min[sb] + self.scale_step[sb] * self.scale_codes


def quantize(
    values: np.ndarray, block_size: int = 64, superblock: int = 256
) -> QuantizedTensor:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot quantize an empty tensor")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    if block_size < 1 or superblock < 1:
        raise ValueError("block_size and superblock must be positive")

    flat = values.reshape(-1)
    n_blocks = -(-flat.size // block_size)
    absmax = np.zeros(n_blocks)
    codes = np.empty(flat.size, dtype=np.uint8)
    for b in range(n_blocks):
        lo, hi = b * block_size, min((b + 1) * block_size, flat.size)
        block = flat[lo:hi]
        amax = np.max(np.abs(block))
        absmax[b] = amax
        if amax == 0.0:
            normalized = np.zeros_like(block)
        else:
            normalized = block / amax
        dist = np.abs(normalized[:, None] - NF4_CODEBOOK[None, :])
        codes[lo:hi] = dist.argmin(axis=1).astype(np.uint8)

    n_super = -(-n_blocks // superblock)
    scale_min = np.zeros(n_super)
    scale_step = np.zeros(n_super)
    scale_codes = np.empty(n_blocks, dtype=np.uint8)
    for s in range(n_super):
        lo, hi = s * superblock, min((s + 1) * superblock, n_blocks)
        group = absmax[lo:hi]
        amin, amax = group.min(), group.max()
        step = (amax - amin) / 255.0
        scale_min[s] = amin
        scale_step[s] = step
        if step == 0.0:
            scale_codes[lo:hi] = 0
        else:
            scale_codes[lo:hi] = np.clip(
                np.round((group - amin) / step), 0, 255
            ).astype(np.uint8)

    return QuantizedTensor(
        codes=codes,
        scale_codes=scale_codes,
        scale_min=scale_min,
        scale_step=scale_step,
        shape=values.shape,
        block_size=block_size,
        superblock=superblock,
    )


def dequantize(qt: QuantizedTensor) -> np.ndarray:
    scales = qt.block_scales()
    flat = NF4_CODEBOOK[qt.codes].copy()
    for b in range(qt.n_blocks):
        lo, hi = b * qt.block_size, min((b + 1) * qt.block_size, flat.size)
        flat[lo:hi] *= scales[b]
    return flat.reshape(qt.shape)
