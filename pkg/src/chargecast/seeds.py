"""Deterministic seed derivation.

Every random draw in the package flows from one root seed through named
streams ("decompose.noise", "model.init", ...). Stream names are hashed
with SHA-256 so the derivation is stable across platforms and runs.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["subseed", "substream"]


def subseed(root: int, name: str) -> np.random.SeedSequence:
    """Derive the seed sequence for a named stream from the root seed."""
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    tag = int.from_bytes(digest[:8], "big")
    return np.random.SeedSequence(entropy=[int(root) & 0xFFFFFFFFFFFFFFFF, tag])


def substream(root: int, name: str) -> np.random.Generator:
    """Generator for a named stream derived from the root seed."""
    return np.random.default_rng(subseed(root, name))
