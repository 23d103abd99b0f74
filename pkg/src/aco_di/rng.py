"""Counter-keyed random streams for ant construction.

Every iteration draws one block of uniforms keyed on ``(seed, iteration)``;
ant ``(worker, sequential)`` reads its own row.  Which thread builds which
ant therefore never changes the numbers an ant sees.
"""

from __future__ import annotations

import numpy as np

__all__ = ["iteration_uniforms", "UniformStream"]

_MASK64 = (1 << 64) - 1


def iteration_uniforms(
    seed: int, iteration: int, parallel_ants: int, sequential_ants: int, width: int
) -> np.ndarray:
    """Return a ``(parallel_ants, sequential_ants, width)`` block of U[0, 1) draws."""
    ss = np.random.SeedSequence(entropy=seed & _MASK64, spawn_key=(iteration,))
    gen = np.random.Generator(np.random.Philox(ss))
    return gen.random((parallel_ants, sequential_ants, max(width, 1)))


class UniformStream:
    """Sequential reader over a 1-D array of uniforms.

    Construction consumes exactly two draws per selection step (one for the
    exploit/explore decision, one for the roulette), so the compiled kernels
    and the generic engine stay in lockstep.
    """

    __slots__ = ("_values", "_pos")

    def __init__(self, values) -> None:
        self._values = values
        self._pos = 0

    @classmethod
    def from_seed(cls, seed: int, size: int) -> "UniformStream":
        return cls(iteration_uniforms(seed, 0, 1, 1, size)[0, 0])

    def next(self) -> float:
        if self._pos >= len(self._values):
            raise IndexError("uniform stream exhausted")
        u = float(self._values[self._pos])
        self._pos += 1
        return u

    @property
    def position(self) -> int:
        return self._pos
