"""Buffered uniform variates drawn from a numpy Generator."""
from __future__ import annotations


class UniformStream:
    """Hands out uniforms one at a time from block draws.

    Consuming plain floats from a pre-drawn list is several times cheaper
    than calling Generator.random() per variate, which matters in the inner
    sampling loops.  The stream is exactly as deterministic as the Generator
    behind it.
    """

    __slots__ = ("_rng", "_block", "_buf", "_pos")

    def __init__(self, rng, block: int = 16384):
        self._rng = rng
        self._block = block
        self._buf = rng.random(block).tolist()
        self._pos = 0

    def u(self) -> float:
        pos = self._pos
        if pos == self._block:
            self._buf = self._rng.random(self._block).tolist()
            pos = 0
        value = self._buf[pos]
        self._pos = pos + 1
        return value
