"""Splittable counter-based pseudo-random generator.

Adversarial sequences must be bit-identical across runs, machines, and
implementations, so instead of a stateful generator we use a pure function
of (key, counter) built from the splitmix64 finalizer:

    mix(z):
        z  = (z + 0x9E3779B97F4A7C15) mod 2^64
        z ^= z >> 30;  z  = z * 0xBF58476D1CE4E5B9 mod 2^64
        z ^= z >> 27;  z  = z * 0x94D049BB133111EB mod 2^64
        return z ^ (z >> 31)

    value(key, i)   = mix(key + i * 0x9E3779B97F4A7C15 mod 2^64)
    child key       = mix(key ^ mix(stream + 0x632BE59BD9B4E019))

Uniform doubles take the top 53 bits: u = (value >> 11) * 2^-53, giving
u in [0, 1).  Normals use the Box-Muller transform on consecutive counter
pairs.  All of this is plain 64-bit integer arithmetic, reproducible in any
language.
"""

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SPLIT = np.uint64(0x632BE59BD9B4E019)
_U53 = 1.0 / (1 << 53)


def _mix(z):
    """splitmix64 finalizer on uint64 scalars or arrays (wraps mod 2^64)."""
    z = (z + _GOLDEN).astype(np.uint64) if isinstance(z, np.ndarray) else np.uint64(z + _GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class CounterRng:
    """Stateless stream of reproducible draws, addressed by counter."""

    def __init__(self, seed, stream=0):
        with np.errstate(over="ignore"):
            key = _mix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
            if stream:
                key = _mix(key ^ _mix(np.uint64(stream) + _SPLIT))
        self.key = np.uint64(key)

    def split(self, stream):
        """Independent child stream; documented derivation above."""
        child = CounterRng.__new__(CounterRng)
        with np.errstate(over="ignore"):
            child.key = np.uint64(_mix(self.key ^ _mix(np.uint64(stream) + _SPLIT)))
        return child

    def raw(self, start, count):
        idx = np.arange(start, start + count, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return _mix(self.key + idx * _GOLDEN)

    def uniforms(self, start, count):
        """count doubles in [0, 1) at counters start..start+count-1."""
        return (self.raw(start, count) >> np.uint64(11)).astype(np.float64) * _U53

    def normals(self, start, count):
        """Standard normals via Box-Muller; consumes 2 counters per value."""
        n = int(count)
        u1 = self.uniforms(start, n)
        u2 = self.uniforms(start + n, n)
        # shift u1 into (0, 1] so the log is finite
        radius = np.sqrt(-2.0 * np.log(1.0 - u1))
        return radius * np.cos(2.0 * np.pi * u2)

    def unit_vectors(self, start, count, dim):
        """count x dim rows of uniformly random unit vectors."""
        g = self.normals(start, count * dim).reshape(count, dim)
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        return g / norms
