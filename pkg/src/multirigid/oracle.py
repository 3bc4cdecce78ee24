"""Brute-force references for tests.

Nothing here shares code with the kernels it checks.  Languages come from
scanning long fixed-point prefixes (substitutions), from rational orbit
coding (Sturmian) or from plain enumeration (full shift); diameters come
from materialized point sets and direct distance evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Callable, Sequence

from .systems import CylinderSet, FullShift, SturmianSystem, SubstitutionSystem


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_points: int = 20000
    max_tuples: int = 2_000_000
    max_window: int = 4096

    def __post_init__(self):
        if min(self.max_points, self.max_tuples, self.max_window) <= 0:
            raise ValueError("budget entries must be positive")


DEFAULT = OracleBudget()


def _pairwise_min(tup, distance) -> Fraction:
    best = None
    for i in range(len(tup)):
        for j in range(i + 1, len(tup)):
            d = distance(tup[i], tup[j])
            if best is None or d < best:
                best = d
    return best


def brute_diam_m(points: Sequence, m: int, distance: Callable, budget: OracleBudget = DEFAULT) -> Fraction:
    """Exhaustive max of the minimal pairwise distance over m-subsets."""
    if m < 2:
        raise ValueError("m must be >= 2")
    if len(points) > budget.max_points or comb(len(points), m) > budget.max_tuples:
        raise BudgetExceeded(f"C({len(points)},{m}) subsets exceed the oracle budget")
    best = Fraction(0)
    for tup in combinations(points, m):
        v = _pairwise_min(tup, distance)
        if v > best:
            best = v
    return best


def window_distance(origin: int) -> Callable[[str, str], Fraction]:
    def dist(x: str, y: str) -> Fraction:
        diffs = [abs(i - origin) for i, (a, b) in enumerate(zip(x, y)) if a != b]
        return Fraction(1, 2 ** min(diffs)) if diffs else Fraction(0)
    return dist


def ultrametric_diam_m(points: Sequence[str], m: int, origin: int) -> Fraction:
    """diam_m of distinct windows under the sequence ultrametric.

    "Closer than t" is an equivalence relation in an ultrametric, so m points
    pairwise at distance >= t exist iff there are m classes.  Classes are
    found by direct distance evaluation against class representatives.
    """
    pts = sorted(set(points))
    dist = window_distance(origin)
    levels = sorted({Fraction(1, 2 ** k) for k in range(origin + 1)}, reverse=True)
    for t in levels:
        reps: list[str] = []
        for p in pts:
            if all(dist(p, r) >= t for r in reps):
                reps.append(p)
                if len(reps) >= m:
                    return t
    return Fraction(0)


# -- languages ------------------------------------------------------------------

def _fixed_prefix(system: SubstitutionSystem, length: int) -> str:
    out = []
    for a in system.alphabet:
        w = a
        while len(w) < length:
            w = "".join(system.rule[c] for c in w)
        out.append(w)
    return "|".join(out)


@lru_cache(maxsize=256)
def oracle_language(system, n: int, budget: OracleBudget = DEFAULT) -> frozenset[str]:
    """Length-n words by direct scanning, doubling until the factor set stops growing."""
    if n > budget.max_window:
        raise BudgetExceeded(f"word length {n} exceeds oracle window budget")
    if n == 0:
        return frozenset({""})
    if isinstance(system, FullShift):
        if len(system.alphabet) ** n > budget.max_points:
            raise BudgetExceeded("full-shift language too large")
        return frozenset("".join(t) for t in product(system.alphabet, repeat=n))
    if isinstance(system, SturmianSystem):
        # orbit of the cell midpoint (2j+1)/2q, in units of 1/2q
        p, q = system.p, system.q
        words = set()
        for j in range(q):
            words.add("".join("1" if (2 * j + 1 + 2 * i * p) % (2 * q) >= 2 * (q - p) else "0"
                              for i in range(n)))
        return frozenset(words)
    if isinstance(system, SubstitutionSystem):
        length = max(64, 16 * n)
        prev = None
        while True:
            text = _fixed_prefix(system, length)
            found = {text[i:i + n] for i in range(len(text) - n + 1)}
            found = frozenset(w for w in found if "|" not in w)
            if found == prev:
                return found
            if length > 64 * budget.max_window * 16:
                raise BudgetExceeded("factor scan did not stabilize")
            prev, length = found, 2 * length
    raise TypeError(f"no oracle language for {system!r}")


def brute_cylinder_diam(c: CylinderSet, m: int, radius: int, budget: OracleBudget = DEFAULT) -> Fraction:
    """Materialize all extensions of ``c`` to [-radius, radius] and take diam_m."""
    if c.is_whole_space:
        lo, hi = -radius, radius
    else:
        lo, hi = min(c.a, -radius), max(c.b, radius)
    if isinstance(c.system, FullShift):
        return _full_shift_diam(c, m, radius, budget)
    words = oracle_language(c.system, hi - lo + 1, budget)
    pts = set()
    for w in words:
        if not c.is_whole_space and w[c.a - lo: c.b - lo + 1] != c.word:
            continue
        pts.add(w[-radius - lo: radius - lo + 1])
        if len(pts) > budget.max_points:
            raise BudgetExceeded("too many extensions")
    if not pts:
        raise ValueError("cylinder word is not legal")
    return ultrametric_diam_m(sorted(pts), m, radius)


def _full_shift_diam(c: CylinderSet, m: int, radius: int, budget: OracleBudget) -> Fraction:
    # every filling of the free coordinates is legal, so enumerate only those
    fixed = {} if c.is_whole_space else {c.a + i: s for i, s in enumerate(c.word)}
    if any(s not in c.system.alphabet for s in fixed.values()):
        raise ValueError("cylinder word is not legal")
    free = [i for i in range(-radius, radius + 1) if i not in fixed]
    if len(c.system.alphabet) ** len(free) > budget.max_points:
        raise BudgetExceeded("too many extensions")
    pts = []
    for fill in product(c.system.alphabet, repeat=len(free)):
        cell = dict(fixed)
        cell.update(zip(free, fill))
        pts.append("".join(cell[i] for i in range(-radius, radius + 1)))
    return ultrametric_diam_m(pts, m, radius)


def brute_density(explicit_set, start: int, stop: int) -> Fraction:
    """|{g in [start, stop) : g in set}| / (stop - start) by direct count."""
    if stop <= start:
        raise ValueError("empty window")
    s = set(explicit_set)
    return Fraction(sum(1 for g in range(start, stop) if g in s), stop - start)


def brute_t_membership(c: CylinderSet, g: int, m: int, eps: Fraction, radius: int) -> bool:
    """diam_m(sigma^g C) > eps, from the materialized cylinder."""
    shifted = CylinderSet(c.a - g, c.b - g, c.word, c.system) if not c.is_whole_space else c
    return brute_cylinder_diam(shifted, m, radius) > eps
