"""Exact multivariate distances and diameters on finite point sets.

Every function takes a ``distance`` callable returning exact scalars
(``Fraction`` or ``int``); nothing here touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Callable, Hashable, Sequence, TypeVar

P = TypeVar("P")
Distance = Callable[[P, P], Fraction]


class InvalidArityError(ValueError):
    pass


class EmptySetError(ValueError):
    pass


def _nonempty(points: Sequence, what: str = "point set") -> None:
    if len(points) == 0:
        raise EmptySetError(f"{what} is empty")


def d_m(points: Sequence[P], distance: Distance) -> Fraction:
    """Minimal pairwise distance of an m-tuple, m >= 2."""
    if len(points) < 2:
        raise InvalidArityError(f"d_m needs at least 2 points, got {len(points)}")
    return min(distance(a, b) for a, b in combinations(points, 2))


def d_m_argmin(points: Sequence[P], distance: Distance) -> tuple[int, int]:
    best = None
    for i, j in combinations(range(len(points)), 2):
        d = distance(points[i], points[j])
        if best is None or d < best[0]:
            best = (d, i, j)
    if best is None:
        raise InvalidArityError("d_m needs at least 2 points")
    return best[1], best[2]


def _distinct(points: Sequence[P], distance: Distance) -> list[P]:
    out: list[P] = []
    for p in points:
        if all(distance(p, q) != 0 for q in out):
            out.append(p)
    return out


def diam_m(points: Sequence[P], m: int, distance: Distance) -> Fraction:
    """m-diameter: max of d_m over m-tuples drawn from ``points``.

    Tuples with a repeated point have a zero pair, so only m-subsets of
    distinct points are enumerated.
    """
    if m < 2:
        raise InvalidArityError(f"m must be >= 2, got {m}")
    _nonempty(points)
    distinct = _distinct(points, distance)
    if len(distinct) < m:
        return Fraction(0)
    return max(d_m(t, distance) for t in combinations(distinct, m))


def diam_m_witness(points: Sequence[P], m: int, distance: Distance) -> tuple[Fraction, tuple[int, ...] | None]:
    """Like :func:`diam_m` but also returns the lexicographically first
    optimal index tuple (indices into ``points``), or ``None`` when the value is 0."""
    if m < 2:
        raise InvalidArityError(f"m must be >= 2, got {m}")
    _nonempty(points)
    best, arg = Fraction(0), None
    for idx in combinations(range(len(points)), m):
        v = d_m([points[i] for i in idx], distance)
        if v > best:
            best, arg = v, idx
    return best, arg


def diameter(points: Sequence[P], distance: Distance) -> Fraction:
    _nonempty(points)
    return max((distance(a, b) for a, b in combinations(points, 2)), default=Fraction(0))


def covering_value_em(points: Sequence[P], m: int, centers: Sequence[P], distance: Distance) -> Fraction:
    """Least radius at which m-1 open balls centred in ``centers`` cover ``points``.

    The open-ball infimum equals the max over points of the distance to the
    nearest chosen centre, minimised over (m-1)-subsets of ``centers``.
    """
    if m < 2:
        raise InvalidArityError(f"m must be >= 2, got {m}")
    _nonempty(points)
    _nonempty(centers, "candidate center set")
    if len(centers) < m - 1:
        raise EmptySetError(f"need at least {m - 1} candidate centers, got {len(centers)}")
    table = [[distance(a, c) for c in centers] for a in points]
    best = None
    for subset in combinations(range(len(centers)), m - 1):
        v = max(min(row[j] for j in subset) for row in table)
        if best is None or v < best:
            best = v
    return best


def directed_distance(a: Sequence[P], b: Sequence[P], distance: Distance) -> Fraction:
    return max(min(distance(x, y) for y in b) for x in a)


def hausdorff_distance(a: Sequence[P], b: Sequence[P], distance: Distance) -> Fraction:
    _nonempty(a)
    _nonempty(b)
    return max(directed_distance(a, b, distance), directed_distance(b, a, distance))


def denseness(a: Sequence[P], net: Sequence[P], distance: Distance) -> Fraction:
    """Sup over net points of the distance to ``a``; ``net`` stands in for the space."""
    _nonempty(a)
    _nonempty(net, "ambient net")
    return directed_distance(net, a, distance)


# -- concrete oracles ---------------------------------------------------------

def circle_distance(x: Fraction, y: Fraction) -> Fraction:
    """Arc distance on R/Z."""
    t = (Fraction(x) - Fraction(y)) % 1
    return min(t, 1 - t)


def line_distance(x: Fraction, y: Fraction) -> Fraction:
    return abs(Fraction(x) - Fraction(y))


def sequence_distance(x: str, y: str, origin: int) -> Fraction:
    """2^-k with k the least |i| where two windows disagree.

    Both words cover the same coordinates; index ``origin`` of each word is
    coordinate 0. Windows that agree everywhere are at distance 0.
    """
    if len(x) != len(y):
        raise ValueError("windows must have equal length")
    n = len(x)
    for k in range(max(origin + 1, n - origin)):
        for i in (origin - k, origin + k):
            if 0 <= i < n and x[i] != y[i]:
                return Fraction(1, 1 << k)
    return Fraction(0)


def window_metric(origin: int) -> Distance:
    def dist(x: str, y: str) -> Fraction:
        return sequence_distance(x, y, origin)
    return dist


def digits_distance(x: Sequence[int], y: Sequence[int]) -> Fraction:
    """Odometer metric on digit prefixes of equal length."""
    for k, (a, b) in enumerate(zip(x, y)):
        if a != b:
            return Fraction(1, 1 << k)
    return Fraction(0)


def replace_entry(points: Sequence[P], i: int, z: P) -> list[P]:
    out = list(points)
    out[i] = z
    return out


def polygon_holds(points: Sequence[P], z: P, distance: Distance) -> bool:
    lhs = d_m(points, distance)
    rhs = sum((d_m(replace_entry(points, i, z), distance) for i in range(len(points))), Fraction(0))
    return lhs <= rhs


__all__ = [
    "InvalidArityError", "EmptySetError", "d_m", "d_m_argmin", "diam_m", "diam_m_witness",
    "diameter", "covering_value_em", "directed_distance", "hausdorff_distance", "denseness",
    "circle_distance", "line_distance", "sequence_distance", "window_metric", "digits_distance",
    "replace_entry", "polygon_holds", "Hashable",
]
