"""Direct products with the max metric.  Only point-level operations."""
from __future__ import annotations

from fractions import Fraction


class ProductSystem:
    kind = "product"

    def __init__(self, components):
        components = tuple(components)
        if len(components) < 2:
            raise ValueError("a product needs at least two components")
        self.components = components

    def __repr__(self):
        return f"ProductSystem({list(self.components)!r})"

    def __eq__(self, other):
        return isinstance(other, ProductSystem) and other.components == self.components

    def __hash__(self):
        return hash(("product", self.components))

    def distance(self, x: tuple, y: tuple) -> Fraction:
        return max(Fraction(s.distance(a, b)) for s, a, b in zip(self.components, x, y))

    def act(self, x: tuple, g: int) -> tuple:
        return tuple(s.act(a, g) for s, a in zip(self.components, x))

    def orbit(self, x: tuple, lo: int, hi: int) -> list[tuple]:
        return [self.act(x, g) for g in range(lo, hi + 1)]
