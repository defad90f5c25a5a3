"""Counter-based random streams shared by the compiled and pure-Python kernels.

Every random quantity is a pure function of (seed, counter), so replicas can
be generated in any order, split across threads, and merged without any
shared generator state.  The mixer is the splitmix64 finalizer; the compiled
kernel implements the identical arithmetic, which is what makes the two
backends bit-for-bit interchangeable.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    x &= MASK64
    x ^= x >> 30
    x = (x * _MIX1) & MASK64
    x ^= x >> 27
    x = (x * _MIX2) & MASK64
    x ^= x >> 31
    return x


def mix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer over a uint64 array."""
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(30)
    x *= np.uint64(_MIX1)
    x ^= x >> np.uint64(27)
    x *= np.uint64(_MIX2)
    x ^= x >> np.uint64(31)
    return x


def counter_bits(seed: int, n: int, offset: int = 0) -> np.ndarray:
    """n uint64 words: word i = mix64(seed + GOLDEN*(offset+i+1))."""
    idx = np.arange(offset + 1, offset + n + 1, dtype=np.uint64)
    return mix64_array(np.uint64(seed & MASK64) + np.uint64(GOLDEN) * idx)


def substream(seed: int, index: int) -> int:
    """Derive an independent child seed for replica `index`."""
    return mix64((seed + GOLDEN * (index + 1)) & MASK64)


def substream_array(seed: int, n: int) -> np.ndarray:
    """Child seeds for replicas 0..n-1 (uint64)."""
    return counter_bits(seed, n)


def open_mask(seed: int, n: int, p: float) -> np.ndarray:
    """Bernoulli(p) bits for sites 0..n-1, keyed by (seed, site index).

    Compares the top 53 bits of the counter word against floor(p * 2^53),
    an exact integer test that both backends reproduce identically.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"occupation probability must be in [0, 1], got {p}")
    threshold = np.uint64(int(p * (1 << 53)))
    return (counter_bits(seed, n) >> np.uint64(11)) < threshold


def stable_key(label: str, seed: int = 0) -> int:
    """Deterministic 64-bit key from a text label (FNV-1a folded into mix64).

    Unlike builtin hash(), stable across processes; used to key per-curve
    replica streams so identical inputs always replay identical randomness.
    """
    h = 0xCBF29CE484222325
    for b in label.encode("utf-8"):
        h ^= b
        h = (h * 0x100000001B3) & MASK64
    return mix64(h ^ (seed & MASK64))
