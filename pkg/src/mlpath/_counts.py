"""Per-link crossing counts packed into one integer.

Each link owns a bit field wide enough for its cap plus one guard bit on top.
With all guard bits set on ``b``, subtracting ``a`` leaves every guard intact
exactly when no field of ``a`` exceeds the matching field of ``b``, so the
componentwise comparison costs one big-integer subtraction.
"""

from __future__ import annotations

from typing import Mapping

from .model import Edge


class CountCodec:
    def __init__(self, caps: Mapping[Edge, int]):
        self.shift: dict[Edge, int] = {}
        self.width: dict[Edge, int] = {}
        guard = 0
        pos = 0
        for e in sorted(caps):
            w = max(1, int(caps[e]).bit_length())
            self.shift[e] = pos
            self.width[e] = w
            guard |= 1 << (pos + w)
            pos += w + 1
        self.guard = guard

    def get(self, code: int, e: Edge) -> int:
        return (code >> self.shift[e]) & ((1 << self.width[e]) - 1)

    def bump(self, code: int, e: Edge) -> int:
        return code + (1 << self.shift[e])

    def leq(self, a: int, b: int) -> bool:
        """Every count in ``a`` is at most the matching count in ``b``."""
        g = self.guard
        return ((b | g) - a) & g == g

    def decode(self, code: int) -> dict[Edge, int]:
        out = {}
        for e in self.shift:
            k = self.get(code, e)
            if k:
                out[e] = k
        return out
