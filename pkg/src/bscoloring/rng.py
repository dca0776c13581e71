"""Seeded random streams.

Every random draw in the package goes through :func:`substream`, which
maps ``(seed, *tags)`` to an independent PCG64 generator via numpy's
``SeedSequence`` spawn keys.  Tags are strings (hashed with CRC-32, which
is stable across platforms and interpreter runs) or non-negative ints.
Topology placement, user drops, dummy users and fading therefore never
share a stream, and adding draws to one purpose does not shift another.
"""

import zlib

import numpy as np

MASK64 = (1 << 64) - 1


def _tag_key(tag):
    if isinstance(tag, str):
        return zlib.crc32(tag.encode("utf-8"))
    tag = int(tag)
    if tag < 0:
        raise ValueError(f"integer tags must be non-negative, got {tag}")
    return tag


def substream(seed, *tags):
    """Return a ``numpy.random.Generator`` (PCG64) for ``(seed, *tags)``."""
    seq = np.random.SeedSequence(
        entropy=int(seed) & MASK64,
        spawn_key=tuple(_tag_key(t) for t in tags),
    )
    return np.random.Generator(np.random.PCG64(seq))


def derive_seed(seed, *tags):
    """A 63-bit integer seed for a sub-experiment, stable like :func:`substream`."""
    return int(substream(seed, "derive", *tags).integers(1 << 63))
