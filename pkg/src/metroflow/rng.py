"""Deterministic 64-bit random number generation.

All randomness in metroflow flows through one named, counter-based
generator so that fitted models and reports are bit-reproducible across
runs, platforms, and implementations. The sequence is fully specified:

    draw(seed, k) = mix64(seed + (k + 1) * GAMMA)   (mod 2**64)

where ``GAMMA = 0x9E3779B97F4A7C15`` and ``mix64`` is the splitmix64
finalizer::

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

Being counter-based, any sub-sequence can be produced independently and
in vectorized form. Derived streams are obtained with

    derive(seed, key) = mix64(mix64(seed) + key * GAMMA)

Higher-level draws are defined on top of the raw 64-bit stream:

* ``uniform``: ``(u >> 11) * 2**-53``, in [0, 1).
* ``normal``: Box-Muller on consecutive uniform pairs, the first
  uniform shifted to (0, 1].
* ``integers(n)``: ``u % n`` (modulo; the bias is negligible for the
  n used here and the rule is trivially portable).
* ``permutation(n)``: argsort (stable) of n raw draws.
"""

from __future__ import annotations

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def mix64(z):
    """splitmix64 finalizer on uint64 scalars or arrays."""
    z = np.uint64(z) if np.isscalar(z) else z.astype(np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def derive(seed: int, key: int) -> int:
    """Derive an independent child seed from (seed, key)."""
    with np.errstate(over="ignore"):
        s = mix64(np.uint64(seed & _MASK)) + np.uint64(key & _MASK) * GAMMA
    return int(mix64(s))


class SplitMix64:
    """Counter-based splitmix64 stream.

    Parameters
    ----------
    seed : int
        Any 64-bit integer; negative values are taken mod 2**64.
    """

    def __init__(self, seed: int):
        self.seed = np.uint64(seed & _MASK)
        self.counter = 0

    def u64(self, size: int | None = None):
        """Next raw draw(s) as uint64."""
        n = 1 if size is None else int(size)
        ks = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            out = mix64(self.seed + ks * GAMMA)
        return out[0] if size is None else out

    def uniform(self, size: int | None = None):
        """Uniform doubles in [0, 1)."""
        u = self.u64(size if size is not None else 1)
        out = (u >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)
        return float(out[0]) if size is None else out

    def normal(self, size: int | None = None):
        """Standard normals via Box-Muller on consecutive uniform pairs."""
        n = 1 if size is None else int(size)
        m = (n + 1) // 2
        u = self.u64(2 * m).reshape(2, m)
        u1 = ((u[0] >> np.uint64(11)).astype(np.float64) + 1.0) * (2.0 ** -53)  # (0, 1]
        u2 = (u[1] >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]
        return float(out[0]) if size is None else out

    def integers(self, n: int, size: int | None = None):
        """Integers in [0, n) via modulo reduction."""
        if n <= 0:
            raise ValueError("n must be positive")
        u = self.u64(size if size is not None else 1)
        out = (u % np.uint64(n)).astype(np.int64)
        return int(out[0]) if size is None else out

    def permutation(self, n: int) -> np.ndarray:
        """Deterministic permutation of range(n)."""
        return np.argsort(self.u64(n), kind="stable").astype(np.int64)
