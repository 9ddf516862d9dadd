"""Counter-based random streams with a reproducibility contract.

A :class:`RandomStream` is a stateless handle ``(seed, stream_index)``.  The
uniform at position ``draw_index`` of a stream is fully determined by the
triple ``(seed, stream_index, draw_index)``: every call re-keys a Philox
counter generator from scratch, so identical handles produce identical
sequences on every run and under any thread layout.  Streams with distinct
``stream_index`` values are independent by construction of the keyed cipher.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomStream:
    seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream_index"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
            if not 0 <= int(value) <= _MASK64:
                raise ParameterError(f"{name} must fit in 64 bits, got {value}")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at draw_index 0 of this stream."""
        key = np.array([self.seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def uniforms(self, count: int) -> np.ndarray:
        """First ``count`` uniforms of the stream, in [0, 1)."""
        if count < 1:
            raise ParameterError(f"count must be >= 1, got {count}")
        return self.generator().random(int(count))

    def substream(self, index: int) -> "RandomStream":
        """Stream with the same seed and a different substream selector."""
        return RandomStream(self.seed, index)
