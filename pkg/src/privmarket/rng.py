"""Counter-based uniform streams.

A stream is identified by a 64-bit key; its j-th variate is a pure function of
``(key, j)``. Episodes of a simulation get keys mixed from ``(seed, index)``, so
any subset of episodes can be regenerated in any order with identical bits.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(z):
    """SplitMix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def episode_keys(seed, indices):
    """Keys for the episodes ``indices`` of a run seeded with ``seed``."""
    base = _mix64(np.array([int(seed) & _MASK], dtype=np.uint64))
    idx = np.asarray(indices, dtype=np.uint64)
    return _mix64(base + idx * _GOLDEN)


def uniforms(keys, start, count):
    """Variates ``start .. start+count-1`` of each stream, shape ``(len(keys), count)``.

    Values lie strictly inside (0, 1): 53 random bits plus a half-ulp offset.
    """
    keys = np.asarray(keys, dtype=np.uint64).reshape(-1, 1)
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64).reshape(1, -1)
    bits = _mix64(keys + counters * _GOLDEN) >> np.uint64(11)
    return (bits.astype(np.float64) + 0.5) * 2.0**-53


class CounterStream:
    """Sequential view of one counter-based stream.

    Exposes ``random()`` like :class:`numpy.random.Generator`, so it can be
    passed wherever the library expects an ``rng``.
    """

    def __init__(self, key, counter=0):
        self.key = int(key) & _MASK
        self.counter = counter

    @classmethod
    def for_episode(cls, seed, index):
        return cls(int(episode_keys(seed, [index])[0]))

    def random(self, size=None):
        count = 1 if size is None else int(size)
        out = uniforms([self.key], self.counter, count)[0]
        self.counter += count
        return float(out[0]) if size is None else out
