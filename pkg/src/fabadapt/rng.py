"""Seeded random streams.

Every random draw in the package comes from a Philox-4x64 counter-based bit
generator whose 128-bit key is derived from ``(seed, stream name)`` with
BLAKE2b. Reals are built from the top 53 bits of each raw 64-bit word, so
results depend only on the seed and the stream name, never on the platform
or on numpy's higher-level distribution code.
"""
import hashlib

import numpy as np

INSTANCE = "instance"
ALGORITHM = "algorithm"

_TWO_POW_M53 = 2.0 ** -53


def stream_key(seed, name):
    digest = hashlib.blake2b(f"{int(seed)}/{name}".encode(), digest_size=16).digest()
    return int.from_bytes(digest, "little")


class Stream:
    """A named random stream.

    >>> s = Stream(1, "instance")
    >>> u = s.uniform(3)
    >>> bool(((0.0 <= u) & (u < 1.0)).all())
    True
    """

    def __init__(self, seed, name=INSTANCE):
        self.seed = int(seed)
        self.name = name
        self._bitgen = np.random.Philox(key=stream_key(seed, name))

    def child(self, name):
        """An independent stream named ``<this name>/<name>``."""
        return Stream(self.seed, f"{self.name}/{name}")

    def raw(self, size):
        return np.asarray(self._bitgen.random_raw(size), dtype=np.uint64)

    def uniform(self, size=None, low=0.0, high=1.0):
        n = 1 if size is None else int(np.prod(size))
        u = (self.raw(n) >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53
        u = low + (high - low) * u
        return float(u[0]) if size is None else u.reshape(size)

    def normal(self, size=None):
        """Standard normals by the Box-Muller transform."""
        n = 1 if size is None else int(np.prod(size))
        half = (n + 1) // 2
        u1 = 1.0 - self.uniform(half)  # in (0, 1]
        u2 = self.uniform(half)
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])[:n]
        return float(z[0]) if size is None else z.reshape(size)
