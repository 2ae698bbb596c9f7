"""Counter-based random streams.

Every Monte Carlo trial owns one stream identified by ``(seed, stream_id)``.
The stream is derived with :class:`numpy.random.SeedSequence` spawn keys, so
trial ``k`` draws the same numbers whether it runs first, last, or in
another process.
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")
        if self.stream_id < 0:
            raise ValueError(f"stream_id must be >= 0, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def label(self) -> str:
        return f"PCG64/SeedSequence(seed={self.seed}, spawn_key=({self.stream_id},))"


def as_generator(rng):
    """Accept an RngStream, a Generator, or an int seed; return (generator, seed, stream_id)."""
    if isinstance(rng, RngStream):
        return rng.generator(), rng.seed, rng.stream_id
    if isinstance(rng, np.random.Generator):
        return rng, None, None
    if isinstance(rng, (int, np.integer)):
        s = RngStream(int(rng))
        return s.generator(), s.seed, s.stream_id
    raise TypeError(f"expected RngStream, Generator or int seed, got {type(rng).__name__}")
