"""Keyed pseudo-random streams.

Every random choice made by an oracle or tester is a pure function of a
master seed, a label and a tuple of integers (vertex id, walk length, walk
index, ...).  Two evaluations with the same inputs always agree, no matter
in which order queries are issued, which is what makes oracle answers
consistent across query sequences.

The mixer is the splitmix64 finalizer chained over the fields.  A scalar
(pure ``int``) and a vectorised (``numpy.uint64``) version are provided and
produce bit-identical outputs.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def derive_key(seed: int, label: str) -> int:
    """64-bit key for the stream named ``label`` under master ``seed``."""
    digest = hashlib.blake2b(f"{int(seed)}/{label}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _mix(z: int) -> int:
    z = (z + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def hash_fields(key: int, *fields: int) -> int:
    h = key & MASK64
    for f in fields:
        h = _mix(h ^ (int(f) & MASK64))
    return h


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def hash_arrays(key: int, *fields) -> np.ndarray:
    """Vectorised :func:`hash_fields`; fields broadcast against each other."""
    arrays = [np.asarray(f).astype(np.int64).astype(np.uint64) for f in fields]
    shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
    h = np.full(shape, key & MASK64, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for a in arrays:
            h = _mix_array(h ^ a)
    return h


class Stream:
    """Sequential draws from a keyed stream.

    ``Stream(seed, "label", 3, 7)`` always yields the same sequence; draw
    ``i`` is ``hash_fields(key, i)``.
    """

    __slots__ = ("key", "counter")

    def __init__(self, seed: int, label: str, *ids: int):
        self.key = hash_fields(derive_key(seed, label), *ids)
        self.counter = 0

    def next_u64(self) -> int:
        value = hash_fields(self.key, self.counter)
        self.counter += 1
        return value

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow needs a positive bound")
        return self.next_u64() % n

    def sample_indices(self, n: int, size: int) -> list[int]:
        """``size`` indices drawn uniformly from ``range(n)`` with replacement."""
        return [self.randbelow(n) for _ in range(size)]
