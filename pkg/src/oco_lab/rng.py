"""Seeded, splittable randomness.

Streams are counter-based (Philox) and derived from a root seed plus a
spawn path, so parallel trials replay byte-identically regardless of
execution order. Normals are produced by the Box-Muller transform on the
uniform stream.
"""

import numpy as np

__all__ = ["stream", "normals", "rademacher"]


def stream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the sub-stream identified by (seed, *path)."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))


def normals(gen: np.random.Generator, size) -> np.ndarray:
    """Standard normals via Box-Muller pairs."""
    n = int(np.prod(size)) if not np.isscalar(size) else int(size)
    m = (n + 1) // 2
    u1 = 1.0 - gen.random(m)  # in (0, 1], keeps the log finite
    u2 = gen.random(m)
    radius = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([radius * np.cos(2.0 * np.pi * u2), radius * np.sin(2.0 * np.pi * u2)])[:n]
    return z.reshape(size)


def rademacher(gen: np.random.Generator, size) -> np.ndarray:
    """Independent +/-1 signs."""
    return np.where(gen.random(size) < 0.5, -1.0, 1.0)
