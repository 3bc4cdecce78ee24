"""Dyadic odometer on finite digit prefixes (least significant digit first)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..metrics import digits_distance


@dataclass(frozen=True)
class OdometerPoint:
    digits: tuple[int, ...]

    def __post_init__(self):
        d = tuple(int(v) for v in self.digits)
        if any(v not in (0, 1) for v in d):
            raise ValueError(f"digits must be 0/1, got {d}")
        object.__setattr__(self, "digits", d)

    @property
    def depth(self) -> int:
        return len(self.digits)

    @classmethod
    def from_int(cls, value: int, depth: int) -> "OdometerPoint":
        value %= 1 << depth
        return cls(tuple((value >> i) & 1 for i in range(depth)))

    def to_int(self) -> int:
        return sum(d << i for i, d in enumerate(self.digits))

    def add(self, g: int) -> "OdometerPoint":
        """Add g with carry; the prefix of length k is exact modulo 2^k."""
        return OdometerPoint.from_int(self.to_int() + g, self.depth)

    def truncate(self, k: int) -> "OdometerPoint":
        if k > self.depth:
            raise ValueError(f"cannot truncate depth {self.depth} to {k}")
        return OdometerPoint(self.digits[:k])

    def __str__(self):
        return "".join(map(str, self.digits))


class OdometerSystem:
    kind = "odometer"

    def __repr__(self):
        return "OdometerSystem()"

    def __eq__(self, other):
        return isinstance(other, OdometerSystem)

    def __hash__(self):
        return hash("odometer")

    @staticmethod
    def distance(x: OdometerPoint, y: OdometerPoint) -> Fraction:
        k = min(x.depth, y.depth)
        return digits_distance(x.digits[:k], y.digits[:k])

    @staticmethod
    def act(x: OdometerPoint, g: int) -> OdometerPoint:
        return x.add(g)

    def orbit(self, x: OdometerPoint, lo: int, hi: int) -> list[OdometerPoint]:
        return [x.add(g) for g in range(lo, hi + 1)]


def parse_digits(text: str | Sequence[int]) -> OdometerPoint:
    if isinstance(text, str):
        return OdometerPoint(tuple(int(c) for c in text.strip()))
    return OdometerPoint(tuple(text))
