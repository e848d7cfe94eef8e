"""Counter-based splittable random streams.

Every source of randomness in the simulator is a numpy Philox generator
keyed on (seed, *stream indices).  Two streams with different indices are
statistically independent, so trajectories, enumeration configurations and
sweep cells can be evaluated in any order (or in parallel) and still
produce bit-identical results.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *indices: int) -> np.random.Generator:
    """Independent generator for the sub-stream identified by `indices`."""
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(i) for i in indices))
    return np.random.Generator(np.random.Philox(seq))


class UniformBuffer:
    """Serves uniform draws in [0,1) from a generator, in fixed order.

    Scalar `Generator.random()` calls dominate the fault-sampling cost in
    tight loops; buffering blocks of draws amortizes that overhead while
    keeping the draw sequence a pure function of the underlying stream.
    """

    __slots__ = ("_rng", "_buf", "_pos", "_block")

    def __init__(self, rng: np.random.Generator, block: int = 4096):
        self._rng = rng
        self._block = block
        self._buf = rng.random(block)
        self._pos = 0

    def next(self) -> float:
        if self._pos == self._block:
            self._buf = self._rng.random(self._block)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u
