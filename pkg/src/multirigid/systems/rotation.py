"""Circle rotation by a rational angle, with exact arc geometry."""
from __future__ import annotations

from fractions import Fraction

from ..metrics import circle_distance
from .errors import UnsupportedRuleError


class RotationSystem:
    kind = "rotation"

    def __init__(self, angle: Fraction | str):
        angle = Fraction(angle)
        if not 0 < angle < 1:
            raise UnsupportedRuleError(f"angle must lie in (0,1), got {angle}")
        self.angle = angle
        self.p, self.q = angle.numerator, angle.denominator

    def __repr__(self):
        return f"RotationSystem({self.angle})"

    def __eq__(self, other):
        return isinstance(other, RotationSystem) and other.angle == self.angle

    def __hash__(self):
        return hash(("rotation", self.angle))

    @staticmethod
    def distance(x: Fraction, y: Fraction) -> Fraction:
        return circle_distance(x, y)

    def act(self, x: Fraction, g: int) -> Fraction:
        return (Fraction(x) + g * self.angle) % 1

    def orbit(self, x: Fraction, lo: int, hi: int) -> list[Fraction]:
        return [self.act(x, g) for g in range(lo, hi + 1)]

    @staticmethod
    def ball_diam_m(delta, m: int) -> Fraction:
        """m-diameter of an open arc of radius ``delta``.

        Spacing s between m points on an open arc of length 2*delta needs
        (m-1)s < 2*delta, and the wrap-around gap 1-(m-1)s caps s at 1/m.
        The supremum is therefore min(2*delta/(m-1), 1/m); once
        delta > 1/2 the ball is the whole circle and the cap applies.
        """
        delta = Fraction(delta)
        if delta <= 0:
            raise ValueError("delta must be positive")
        if m < 2:
            raise ValueError("m must be >= 2")
        return min(2 * delta / (m - 1), Fraction(1, m))

    def coding(self, x: Fraction, lo: int, hi: int) -> str:
        """Orbit coded against [0, 1-angle) -> 0 and [1-angle, 1) -> 1."""
        cut = 1 - self.angle
        return "".join("1" if y >= cut else "0" for y in self.orbit(x, lo, hi))
