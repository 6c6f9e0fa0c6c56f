"""Seed derivation and generator construction.

Everything random in this package flows through ``numpy.random.Generator``
objects built from explicit 64-bit seeds. Child seeds are derived with a
splitmix-style mixer so that parallel sample generation is bit-reproducible:
``derive(master, index)`` depends only on its arguments, never on call order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 finalization round (Steele et al. mixing constants)."""
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive(seed: int, index: int) -> int:
    """Derive an independent child seed from (seed, index).

    Deterministic and order-free: the same pair always yields the same child,
    regardless of how many other children were derived before it.
    """
    z = (splitmix64(seed & _MASK64) + (index & _MASK64) * _GOLDEN) & _MASK64
    return splitmix64(z)


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator seeded from a 64-bit integer."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))
