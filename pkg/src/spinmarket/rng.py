"""Seedable counter-based random number generator (splitmix64).

The generator state is a single 64-bit counter advanced by a fixed odd
increment; each output is a strong 64-bit mix of the state. Because the
increment is odd, the state walks a full-period cycle of 2^64 values, so
any two streams are non-overlapping segments of one global sequence whose
phases are separated pseudorandomly (expected distance 2^63 draws).

Stream-split rule: replica ``r`` of a run with base seed ``s`` uses the
seed ``derive_seed(s, r)``, defined as the ``(r + 1)``-th raw output of a
splitmix64 sequence started at ``s``. One stream per replica; within a
replica the same stream serves lattice initialisation and the dynamics,
in that order.

The same algorithm is implemented in ``_kernels`` for the compiled hot
loops; the two implementations are bit-identical (covered by tests).
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 output function: avalanche mix of a 64-bit value."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def derive_seed(base_seed: int, index: int) -> int:
    """Seed for independent stream ``index`` derived from ``base_seed``."""
    if index < 0:
        raise ValueError("stream index must be >= 0")
    return mix64((base_seed + (index + 1) * GOLDEN) & _MASK)


class SplitMix64:
    """Mutable splitmix64 stream.

    The Python-level methods are used for initialisation and bookkeeping;
    sweeps advance the same state inside compiled kernels.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & _MASK
        return mix64(self.state)

    def uniform(self) -> float:
        """Double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def bits_array(self, n: int) -> np.ndarray:
        """Next ``n`` raw outputs as uint64, advancing the state by ``n``.

        Exploits the counter form: output k is mix(state + k * GOLDEN),
        so the block vectorises while staying identical to n sequential
        calls of :meth:`next_u64`.
        """
        counters = np.uint64(self.state) + np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GOLDEN)
        self.state = (self.state + n * GOLDEN) & _MASK
        z = counters
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    def state_u64(self) -> np.uint64:
        return np.uint64(self.state)

    def set_state(self, state: int) -> None:
        self.state = int(state) & _MASK
