"""Subshifts with exact language oracles: constant-length substitutions,
Sturmian codings of rational rotations, and full shifts.

Words are Python strings of single-character symbols.  Coordinates are
two-sided; ``window(a, b)`` always means the inclusive range ``a..b``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product

import numpy as np

from ..metrics import sequence_distance
from .errors import ExtensionError, RuleParseError, UnsupportedRuleError

LANGUAGE_CAP = 64
FIXED_POINT_CAP = 1 << 24


# -- systems ------------------------------------------------------------------

class SymbolicSystem:
    """Common surface of the shipped subshifts."""

    kind: str = "symbolic"
    alphabet: str

    def legal_words(self, length: int) -> frozenset[str]:
        raise NotImplementedError

    def is_legal(self, word: str) -> bool:
        return len(word) == 0 or word in self.legal_words(len(word))

    def extension_counts(self, cylinder: "CylinderSet", r: int, gs: np.ndarray) -> np.ndarray:
        """Number of distinct words on ``[g-r, g+r]`` among points of ``cylinder``, per ``g``."""
        raise NotImplementedError

    # distances between infinite points are resolved on [-R, R] with this R
    distance_radius: int = 32

    def distance(self, x: "SymbolicPoint", y: "SymbolicPoint") -> Fraction:
        R = self.distance_radius
        return sequence_distance(x.window(-R, R), y.window(-R, R), R)

    def act(self, x: "SymbolicPoint", g: int) -> "SymbolicPoint":
        return x.shift(g)

    def _check_length(self, length: int, cap: int = LANGUAGE_CAP) -> None:
        if length < 0:
            raise ValueError(f"word length must be >= 0, got {length}")
        if length > cap:
            raise ExtensionError(f"word length {length} exceeds language cap {cap}")


def parse_rule(rule: str) -> dict[str, str]:
    """Parse ``"0->01;1->10"`` into a symbol map."""
    if not isinstance(rule, str) or not rule.strip():
        raise RuleParseError("empty substitution rule")
    out: dict[str, str] = {}
    for part in rule.split(";"):
        part = part.strip()
        if not part:
            continue
        if "->" not in part:
            raise RuleParseError(f"missing '->' in {part!r}")
        lhs, rhs = (s.strip() for s in part.split("->", 1))
        if len(lhs) != 1:
            raise RuleParseError(f"left side must be one symbol, got {lhs!r}")
        if not rhs:
            raise RuleParseError(f"empty image for symbol {lhs!r}")
        if lhs in out:
            raise RuleParseError(f"symbol {lhs!r} defined twice")
        out[lhs] = rhs
    if not out:
        raise RuleParseError("empty substitution rule")
    missing = {c for img in out.values() for c in img} - out.keys()
    if missing:
        raise RuleParseError(f"image uses undefined symbols {sorted(missing)}")
    return out


def format_rule(rule: dict[str, str]) -> str:
    return ";".join(f"{a}->{rule[a]}" for a in sorted(rule))


class SubstitutionSystem(SymbolicSystem):
    """Subshift of a primitive constant-length substitution."""

    kind = "substitution"

    def __init__(self, rule: str | dict[str, str]):
        self.rule = parse_rule(rule) if isinstance(rule, str) else dict(rule)
        self.alphabet = "".join(sorted(self.rule))
        lengths = {len(v) for v in self.rule.values()}
        if len(lengths) != 1:
            raise UnsupportedRuleError("only constant-length substitutions are supported")
        self.q = lengths.pop()
        if self.q < 2:
            raise UnsupportedRuleError("substitution length must be >= 2")
        if not self.is_primitive():
            raise UnsupportedRuleError(f"rule {format_rule(self.rule)} is not primitive")
        self._table = str.maketrans(self.rule)

    def __repr__(self) -> str:
        return f"SubstitutionSystem({format_rule(self.rule)!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, SubstitutionSystem) and other.rule == self.rule

    def __hash__(self) -> int:
        return hash(format_rule(self.rule))

    def is_primitive(self) -> bool:
        idx = {a: i for i, a in enumerate(self.alphabet)}
        n = len(idx)
        M = np.zeros((n, n), dtype=np.int64)
        for a, img in self.rule.items():
            for c in img:
                M[idx[c], idx[a]] = 1
        P = np.eye(n, dtype=np.int64)
        # Wielandt bound on the primitivity exponent
        for _ in range((n - 1) ** 2 + 1):
            P = np.minimum(P @ M, 1)
        return bool((P > 0).all())

    def apply(self, word: str, times: int = 1) -> str:
        for _ in range(times):
            word = word.translate(self._table)
        return word

    @cached_property
    def _two_words(self) -> frozenset[str]:
        words = {w[i:i + 2] for a in self.alphabet for w in [self.apply(a)] for i in range(len(w) - 1)}
        frontier = set(words)
        while frontier:
            new = set()
            for w in frontier:
                img = self.apply(w)
                new.update(img[i:i + 2] for i in range(len(img) - 1))
            frontier = new - words
            words |= frontier
        return frozenset(words)

    @lru_cache(maxsize=None)
    def legal_words(self, length: int) -> frozenset[str]:
        self._check_length(length)
        if length == 0:
            return frozenset({""})
        if length == 1:
            return frozenset(self.alphabet)
        k = 0
        while self.q ** k < length:
            k += 1
        out = set()
        for w in self._two_words:
            img = self.apply(w, k)
            out.update(img[i:i + length] for i in range(len(img) - length + 1))
        return frozenset(out)

    def fixed_point_power(self, left: str, right: str) -> int:
        """Least p with tau^p(right) starting with ``right`` and tau^p(left) ending with ``left``."""
        for p in range(1, len(self.alphabet) ** 2 + 2):
            if self.apply(right, p)[0] == right and self.apply(left, p)[-1] == left:
                return p
        raise UnsupportedRuleError(f"no power of the rule fixes {left}.{right}")

    def extension_counts(self, cylinder, r, gs):
        gs = np.asarray(gs, dtype=np.int64)
        if cylinder.is_whole_space:
            return np.full(gs.shape, len(self.legal_words(2 * r + 1)), dtype=np.int64)
        return self.gap_engine.counts(cylinder.word, 2 * r + 1, gs - r - cylinder.a)

    @cached_property
    def gap_engine(self):
        from ._gap import GapEngine
        return GapEngine(self)


class FullShift(SymbolicSystem):
    kind = "fullshift"

    def __init__(self, alphabet: str = "01"):
        if len(alphabet) < 1 or len(set(alphabet)) != len(alphabet):
            raise UnsupportedRuleError(f"bad alphabet {alphabet!r}")
        self.alphabet = "".join(sorted(alphabet))

    def __repr__(self) -> str:
        return f"FullShift({self.alphabet!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FullShift) and other.alphabet == self.alphabet

    def __hash__(self) -> int:
        return hash(("full", self.alphabet))

    @lru_cache(maxsize=None)
    def legal_words(self, length: int) -> frozenset[str]:
        self._check_length(length, cap=20)
        return frozenset("".join(t) for t in product(self.alphabet, repeat=length))

    def is_legal(self, word: str) -> bool:
        return all(c in self.alphabet for c in word)

    def extension_counts(self, cylinder, r, gs):
        gs = np.asarray(gs, dtype=np.int64)
        if cylinder.is_whole_space:
            overlap = np.zeros_like(gs)
        else:
            lo = np.maximum(gs - r, cylinder.a)
            hi = np.minimum(gs + r, cylinder.b)
            overlap = np.maximum(hi - lo + 1, 0)
        free = (2 * r + 1) - overlap
        return np.power(len(self.alphabet), free).astype(np.int64)


class SturmianSystem(SymbolicSystem):
    """Coding of the rotation by ``angle = p/q`` against ``[0, 1-angle) | [1-angle, 1)``.

    With a rational angle every coding is periodic; the subshift is the
    finite set of q "cell codings": cell j sends i to 1 iff
    ``(j + i*p) mod q >= q - p``.  The left-closed coding of y is cell
    ``floor(q*y)``; the right-closed one differs only when q*y is an integer,
    where it is the preceding cell.
    """

    kind = "sturmian"
    alphabet = "01"

    def __init__(self, angle: Fraction | str):
        angle = Fraction(angle)
        if not 0 < angle < 1:
            raise UnsupportedRuleError(f"angle must lie in (0,1), got {angle}")
        self.angle = angle
        self.p, self.q = angle.numerator, angle.denominator

    def __repr__(self) -> str:
        return f"SturmianSystem({self.angle})"

    def __eq__(self, other) -> bool:
        return isinstance(other, SturmianSystem) and other.angle == self.angle

    def __hash__(self) -> int:
        return hash(("sturmian", self.angle))

    def cell_codes(self, cells: np.ndarray, a: int, b: int) -> np.ndarray:
        """Boolean matrix, rows = cells, columns = coordinates a..b."""
        cells = np.asarray(cells, dtype=np.int64)
        i = np.arange(a, b + 1, dtype=np.int64)
        return ((cells[:, None] + i[None, :] * self.p) % self.q) >= self.q - self.p

    def cell_of(self, y: Fraction, convention: str = "left") -> int:
        y = Fraction(y) % 1
        t = y * self.q
        j = t.numerator // t.denominator
        if convention == "right" and t.denominator == 1:
            j -= 1
        elif convention not in ("left", "right"):
            raise ValueError(f"convention must be 'left' or 'right', got {convention!r}")
        return j % self.q

    @lru_cache(maxsize=None)
    def legal_words(self, length: int) -> frozenset[str]:
        self._check_length(length)
        if length == 0:
            return frozenset({""})
        codes = self.cell_codes(np.arange(self.q), 0, length - 1)
        return frozenset("".join("1" if c else "0" for c in row) for row in np.unique(codes, axis=0))

    def cylinder_cells(self, cylinder) -> np.ndarray:
        cells = np.arange(self.q, dtype=np.int64)
        if cylinder.is_whole_space:
            return cells
        codes = self.cell_codes(cells, cylinder.a, cylinder.b)
        want = np.frombuffer(cylinder.word.encode(), dtype=np.uint8) == ord("1")
        return cells[(codes == want).all(axis=1)]

    def extension_counts(self, cylinder, r, gs):
        gs = np.asarray(gs, dtype=np.int64)
        cells = self.cylinder_cells(cylinder)
        span = self._as_arc(cells)
        if span is None or 2 * r + 2 > self.q:
            return self._brute_counts(cells, r, gs)
        j0, n = span
        if n == 1:
            return np.ones(gs.shape, dtype=np.int64)
        # cut between cells j, j+1 at window coordinate i' iff j == -i'p - 1 (mod q)
        offs = np.arange(-r, r + 2, dtype=np.int64)
        ip = gs[:, None] + offs[None, :]
        pos = (-ip * self.p - 1 - j0) % self.q
        return 1 + (pos < n - 1).sum(axis=1)

    def _as_arc(self, cells: np.ndarray) -> tuple[int, int] | None:
        n = len(cells)
        if n == 0 or n == self.q:
            return None
        member = np.zeros(self.q, dtype=bool)
        member[cells] = True
        starts = np.nonzero(member & ~np.roll(member, 1))[0]
        if len(starts) != 1:
            return None
        return int(starts[0]), n

    def _brute_counts(self, cells, r, gs):
        offs = np.arange(-r, r + 1, dtype=np.int64)
        out = np.empty(len(gs), dtype=np.int64)
        for k, g in enumerate(gs.ravel()):
            codes = ((cells[:, None] + (g + offs)[None, :] * self.p) % self.q) >= self.q - self.p
            out[k] = len(np.unique(codes, axis=0))
        return out.reshape(gs.shape)


# -- cylinders ------------------------------------------------------------------

@dataclass(frozen=True)
class CylinderSet:
    """Points fixing ``word`` on coordinates ``a..b``; ``a > b`` is the whole space."""

    a: int
    b: int
    word: str
    system: SymbolicSystem = field(compare=False, repr=False)

    def __post_init__(self):
        if self.a <= self.b:
            if len(self.word) != self.b - self.a + 1:
                raise ValueError("word length must match the interval")
        elif self.word:
            raise ValueError("whole-space cylinder carries no word")

    @property
    def is_whole_space(self) -> bool:
        return self.a > self.b

    def contains(self, point) -> bool:
        return self.is_whole_space or point.window(self.a, self.b) == self.word


def radius_for_delta(delta) -> int:
    """Least integer R >= 0 with 2^(-R-1) < delta, or -1 when delta > 1 (whole space)."""
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if delta > 1:
        return -1
    R = 0
    while Fraction(1, 2 ** (R + 1)) >= delta:
        R += 1
    return R


def ball_as_cylinder(x, delta) -> CylinderSet:
    """The open ball of radius ``delta`` around the symbolic point ``x``."""
    R = radius_for_delta(delta)
    if R < 0:
        return CylinderSet(1, 0, "", x.system)
    return CylinderSet(-R, R, x.window(-R, R), x.system)


def shift_cylinder(c: CylinderSet, g: int) -> CylinderSet:
    if c.is_whole_space:
        return c
    return CylinderSet(c.a - g, c.b - g, c.word, c.system)


@dataclass(frozen=True)
class CylinderDiameter:
    value: Fraction
    status: str  # "exact" or "inconclusive"
    radius: int | None = None  # least r with N(r) >= m, if any


def cylinder_diam_m(c: CylinderSet, m: int, max_radius: int) -> CylinderDiameter:
    """m-diameter of a cylinder from window-restriction counts.

    m points pairwise at distance >= 2^-r exist iff at least m distinct
    restrictions to [-r, r] occur, so the answer is 2^-r* for the least
    such r.  If none appears up to ``max_radius`` the value is 0, tagged
    exact only when the count did not grow over the last radius step.
    """
    if m < 2:
        from ..metrics import InvalidArityError
        raise InvalidArityError(f"m must be >= 2, got {m}")
    g0 = np.zeros(1, dtype=np.int64)
    prev = None
    for r in range(max_radius + 1):
        n = int(c.system.extension_counts(c, r, g0)[0])
        if n >= m:
            return CylinderDiameter(Fraction(1, 2 ** r), "exact", r)
        if r == max_radius:
            break
        prev = n
    return CylinderDiameter(Fraction(0), "exact" if prev == n else "inconclusive")


# -- points ---------------------------------------------------------------------

class SymbolicPoint:
    system: SymbolicSystem

    def window(self, a: int, b: int) -> str:
        raise NotImplementedError

    def symbols(self, a: int, b: int) -> np.ndarray:
        return np.frombuffer(self.window(a, b).encode(), dtype=np.uint8).copy()

    def shift(self, g: int) -> "SymbolicPoint":
        if g == 0:
            return self
        return ShiftedPoint(self, g)


class ShiftedPoint(SymbolicPoint):
    """sigma^g(base): coordinate i reads base at i + g."""

    def __init__(self, base: SymbolicPoint, g: int):
        if isinstance(base, ShiftedPoint):
            base, g = base.base, base.g + g
        self.base, self.g, self.system = base, g, base.system

    def window(self, a, b):
        return self.base.window(a + self.g, b + self.g)

    def shift(self, g):
        return self.base.shift(self.g + g)

    def __repr__(self):
        return f"ShiftedPoint({self.base!r}, {self.g})"


class FixedPoint(SymbolicPoint):
    """Two-sided fixed point ``left.right`` of a power of a substitution."""

    def __init__(self, system: SubstitutionSystem, seed: str = "1.0"):
        left, sep, right = seed.partition(".")
        if sep != "." or len(left) != 1 or len(right) != 1:
            raise ValueError(f"fixed-point seed must look like 'a.b', got {seed!r}")
        if not system.is_legal(left + right):
            raise ValueError(f"seed {seed!r} is not a legal two-letter word")
        self.system, self.seed = system, seed
        self.power = system.fixed_point_power(left, right)
        self._left, self._right = left, right  # _left is read right to left

    def __repr__(self):
        return f"FixedPoint({self.system!r}, {self.seed!r})"

    def _grow(self, need_left: int, need_right: int) -> None:
        if max(need_left, need_right) > FIXED_POINT_CAP:
            raise ExtensionError(f"fixed point window beyond cap {FIXED_POINT_CAP}")
        s = self.system
        while len(self._right) < need_right:
            self._right = s.apply(self._right, self.power)
        while len(self._left) < need_left:
            # grow the forward word, keep it stored reversed
            self._left = s.apply(self._left[::-1], self.power)[::-1]

    def window(self, a, b):
        if a > b:
            return ""
        self._grow(max(0, -a), max(0, b + 1))
        parts = []
        if a < 0:
            lo, hi = -min(b, -1) - 1, -a - 1  # reversed indices
            parts.append(self._left[lo:hi + 1][::-1])
        if b >= 0:
            parts.append(self._right[max(a, 0):b + 1])
        return "".join(parts)


class PeriodicPoint(SymbolicPoint):
    def __init__(self, system: SymbolicSystem, period: str, phase: int = 0):
        if not period:
            raise ValueError("empty period word")
        self.system, self.period, self.phase = system, period, phase

    def __repr__(self):
        return f"PeriodicPoint({self.period!r}, phase={self.phase})"

    def window(self, a, b):
        n = len(self.period)
        return "".join(self.period[(i + self.phase) % n] for i in range(a, b + 1))


class CodingPoint(SymbolicPoint):
    """Sturmian coding of the rotation orbit of ``y``."""

    def __init__(self, system: SturmianSystem, y: Fraction | str = 0, convention: str = "left"):
        self.system, self.y, self.convention = system, Fraction(y) % 1, convention
        self.cell = system.cell_of(self.y, convention)

    def __repr__(self):
        return f"CodingPoint({self.system.angle}, y={self.y}, {self.convention})"

    def window(self, a, b):
        if a > b:
            return ""
        row = self.system.cell_codes(np.array([self.cell]), a, b)[0]
        return "".join("1" if c else "0" for c in row)


class WordPoint(SymbolicPoint):
    """A point known only on a finite window; ``origin`` indexes coordinate 0."""

    def __init__(self, system: SymbolicSystem, word: str, origin: int = 0):
        self.system, self.word, self.origin = system, word, origin

    def __repr__(self):
        return f"WordPoint({self.word!r}, origin={self.origin})"

    def window(self, a, b):
        lo, hi = a + self.origin, b + self.origin
        if lo < 0 or hi >= len(self.word):
            raise ExtensionError(f"window [{a},{b}] outside the known word")
        return self.word[lo:hi + 1]


def complement(word: str, alphabet: str = "01") -> str:
    if len(alphabet) != 2:
        raise ValueError("complement needs a two-letter alphabet")
    return word.translate(str.maketrans(alphabet, alphabet[::-1]))


class ComplementPoint(SymbolicPoint):
    """Bit-flip of a binary point."""

    def __init__(self, base: SymbolicPoint):
        self.base, self.system = base, base.system

    def window(self, a, b):
        return complement(self.base.window(a, b), self.system.alphabet)

    def __repr__(self):
        return f"ComplementPoint({self.base!r})"


def factors(word: str, length: int) -> set[str]:
    return {word[i:i + length] for i in range(len(word) - length + 1)}
