"""Factor maps onto the maximal equicontinuous models and their fibers.

Two maps ship: a constant-length-2 substitution onto the dyadic odometer
(digits found by repeated desubstitution) and a Sturmian coding onto its
rotation.

Odometer samples carry a long digit prefix standing in for a Haar-random
point.  ``fiber_enumerate`` lists every legal window compatible with all of
those digits, which for almost every sample is the exact fiber restricted to
the window; ``ball_preimage`` uses only the first k digits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .metrics import diam_m, window_metric
from .systems import (CodingPoint, OdometerPoint, PrecisionError, SturmianSystem, SubstitutionSystem,
                      SymbolicPoint, WordPoint)
from .systems.symbolic import LANGUAGE_CAP

RECOGNIZABILITY_MARGIN = 8
DEFAULT_SAMPLE_DIGITS = 64
DEFAULT_SAMPLES = 512


# -- projections ----------------------------------------------------------------

def _desubstitute(system: SubstitutionSystem, word: str, origin: int) -> tuple[int, str, int]:
    """One round: returns (origin offset in its block, preimage word, new origin)."""
    q = system.q
    inverse = {img: a for a, img in system.rule.items()}
    if len(inverse) != len(system.rule):
        raise PrecisionError("letter images are not distinct; parsing is ambiguous", 0)
    phases = []
    for phi in range(q):
        n = (len(word) - phi) // q
        blocks = [word[phi + j * q: phi + (j + 1) * q] for j in range(n)]
        if n == 0 or not all(b in inverse for b in blocks):
            continue
        pre = "".join(inverse[b] for b in blocks)
        if len(pre) <= LANGUAGE_CAP and not system.is_legal(pre):
            continue
        if not phi <= origin < phi + n * q:
            continue
        phases.append((phi, pre))
    if len(phases) != 1:
        raise PrecisionError(f"{len(phases)} parsings of the window", 0)
    phi, pre = phases[0]
    return (origin - phi) % q, pre, (origin - phi) // q


def tm_project(x: SymbolicPoint, k: int, margin: int = RECOGNIZABILITY_MARGIN) -> OdometerPoint:
    """First k odometer digits of a point of a length-2 substitution subshift.

    Reads the window of length ``margin * 2^k`` around the origin, then
    desubstitutes k times; digit j is the origin's offset inside its level-j
    block.  Raises :class:`PrecisionError` carrying the achieved depth when a
    level admits zero or several parsings.
    """
    system = x.system
    if not isinstance(system, SubstitutionSystem) or system.q != 2:
        raise TypeError("tm_project needs a constant-length-2 substitution point")
    if k < 0:
        raise ValueError("depth must be >= 0")
    half = margin * (1 << k) // 2
    word, origin = x.window(-half, half - 1), half
    digits = []
    for level in range(k):
        try:
            d, word, origin = _desubstitute(system, word, origin)
        except PrecisionError as exc:
            raise PrecisionError(f"level {level}: {exc}", achieved=level) from exc
        digits.append(d)
    return OdometerPoint(tuple(digits))


def sturmian_project(x: SymbolicPoint) -> tuple[Fraction, Fraction]:
    """Rotation interval [j/q, (j+1)/q] containing the coded point (left convention)."""
    system = x.system
    if not isinstance(system, SturmianSystem):
        raise TypeError("sturmian_project needs a Sturmian point")
    if isinstance(x, CodingPoint):
        j = x.cell
    else:
        cells = np.arange(system.q)
        n = 0
        while len(cells) > 1:
            n = max(1, 2 * n)
            if 2 * n + 1 > 4 * system.q:
                raise PrecisionError("window does not isolate a cell")
            want = np.frombuffer(x.window(-n, n).encode(), dtype=np.uint8) == ord("1")
            cells = cells[(system.cell_codes(cells, -n, n) == want).all(axis=1)]
        if len(cells) == 0:
            raise PrecisionError("point is not a Sturmian coding")
        j = int(cells[0])
    return Fraction(j, system.q), Fraction(j + 1, system.q)


# -- enumeration ----------------------------------------------------------------

def _letter_walk(system: SubstitutionSystem, a: str, levels: int, n: int) -> str:
    """Letter at position n of tau^levels(a)."""
    q = system.q
    for lvl in range(levels - 1, -1, -1):
        a = system.rule[a][(n // q ** lvl) % q]
    return a


def preimage_words(system: SubstitutionSystem, value: int, depth: int, lo: int, hi: int) -> set[str]:
    """Windows ``lo..hi`` of all points ``sigma^value tau^depth(z)``, z in the subshift.

    For the odometer this is the preimage of the ball of radius 2^-depth
    around the point whose first ``depth`` digits encode ``value``.
    """
    q = system.q
    size = q ** depth
    value %= size
    n_lo, n_hi = lo + value, hi + value
    j_lo, j_hi = n_lo // size, n_hi // size
    span = hi - lo + 1
    m = 0
    while q ** m < span and m < depth:
        m += 1
    low = q ** m
    tails = {a: system.apply(a, m) for a in system.alphabet}
    out = set()
    for z in system.legal_words(j_hi - j_lo + 1):
        parts = []
        n = n_lo
        while n <= n_hi:
            j, off = divmod(n, size)
            top, rest = divmod(off, low)
            b = _letter_walk(system, z[j - j_lo], depth - m, top)
            take = min(low - rest, n_hi - n + 1)
            parts.append(tails[b][rest:rest + take])
            n += take
        out.add("".join(parts))
    return out


def cluster_words(words: Sequence[str], half: int) -> dict[str, list[str]]:
    """Group windows on [-half, half] by their restriction to the central half."""
    quarter = half // 2
    groups: dict[str, list[str]] = {}
    for w in sorted(words):
        groups.setdefault(w[half - quarter: half + quarter + 1], []).append(w)
    return groups


@dataclass(frozen=True)
class FiberSample:
    target: object
    depth: int
    words: tuple[str, ...]
    clusters: tuple[str, ...]  # one representative per cluster
    diams: dict = field(default_factory=dict)

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)


class FactorMap:
    """Base class: ``project`` and ``fiber_enumerate`` on finite windows."""

    source = None

    def project(self, x, k: int):
        raise NotImplementedError

    def fiber_words(self, y, k: int, width: int) -> set[str]:
        raise NotImplementedError

    def fiber_enumerate(self, y, k: int, width: int) -> FiberSample:
        if width % 4:
            raise ValueError("window width must be a multiple of 4")
        words = self.fiber_words(y, k, width)
        reps = tuple(g[0] for g in cluster_words(words, width // 2).values())
        return FiberSample(y, k, tuple(sorted(words)), reps)


class OdometerFactor(FactorMap):
    """Length-2 substitution onto the dyadic odometer."""

    def __init__(self, source: SubstitutionSystem, margin: int = RECOGNIZABILITY_MARGIN):
        if source.q != 2:
            raise TypeError("odometer factor needs a constant-length-2 substitution")
        self.source, self.margin = source, margin

    def project(self, x, k):
        return tm_project(x, k, self.margin)

    def fiber_words(self, y: OdometerPoint, k: int, width: int) -> set[str]:
        if width < self.margin * (1 << k):
            raise PrecisionError(f"window {width} below margin * 2^{k}", achieved=0)
        if y.depth < k:
            raise PrecisionError(f"sample has only {y.depth} digits", achieved=y.depth)
        half = width // 2
        words = preimage_words(self.source, y.to_int(), y.depth, -half, half)
        want = y.truncate(k)
        for w in words:
            got = tm_project(WordPoint(self.source, w, half), k, self.margin)
            if got != want:
                raise PrecisionError(f"window projects to {got}, expected {want}", achieved=k)
        return words

    def ball_preimage(self, y: OdometerPoint, k: int, width: int) -> set[str]:
        half = width // 2
        return preimage_words(self.source, y.truncate(k).to_int(), k, -half, half)

    def sample_targets(self, n: int, seed: int, digits: int = DEFAULT_SAMPLE_DIGITS) -> list[OdometerPoint]:
        rng = np.random.default_rng(seed)
        return [OdometerPoint(tuple(int(b) for b in rng.integers(0, 2, size=digits))) for _ in range(n)]


class RotationFactor(FactorMap):
    """Sturmian coding onto its rotation; targets are exact rationals."""

    def __init__(self, source: SturmianSystem):
        self.source = source

    def project(self, x, k=0):
        return sturmian_project(x)

    def fiber_words(self, y: Fraction, k: int, width: int) -> set[str]:
        half = width // 2
        return {CodingPoint(self.source, y, conv).window(-half, half) for conv in ("left", "right")}

    def on_endpoint_orbit(self, y: Fraction) -> bool:
        # the partition endpoints 0 and 1-angle both lie on the orbit of 0
        return (Fraction(y) * self.source.q).denominator == 1

    def sample_targets(self, n: int, seed: int, refine: int = 10) -> list[Fraction]:
        rng = np.random.default_rng(seed)
        den = self.source.q << refine
        return [Fraction(int(j), den) for j in rng.integers(0, den, size=n)]


def factor_for(system) -> FactorMap:
    if isinstance(system, SubstitutionSystem):
        return OdometerFactor(system)
    if isinstance(system, SturmianSystem):
        return RotationFactor(system)
    raise TypeError(f"no factor map ships for {system!r}")


# -- profiles and verdicts ------------------------------------------------------

@dataclass
class FiberProfile:
    samples: list[FiberSample]
    m_range: tuple[int, ...]
    depth: int
    width: int
    failures: int = 0

    def fraction_zero(self, m: int) -> Fraction:
        if not self.samples:
            return Fraction(0)
        return Fraction(sum(1 for s in self.samples if s.diams[m] == 0), len(self.samples))

    def min_diam(self, m: int) -> Fraction:
        return min(s.diams[m] for s in self.samples)


def fiber_diam_profile(fmap: FactorMap, samples: Sequence, depth: int, width: int,
                       m_range: Sequence[int] = (2, 3, 4, 5)) -> FiberProfile:
    metric = window_metric(width // 2)
    out, failures = [], 0
    for y in samples:
        try:
            s = fmap.fiber_enumerate(y, depth, width)
        except PrecisionError:
            failures += 1
            continue
        for m in m_range:
            s.diams[m] = diam_m(list(s.clusters), m, metric)
        out.append(s)
    return FiberProfile(out, tuple(m_range), depth, width, failures)


@dataclass(frozen=True)
class MjectivityVerdict:
    m: int
    almost: bool
    almost_surely: bool
    fraction: Fraction
    min_diam: Fraction
    dichotomy: str
    samples: int
    failures: int


def mjectivity_verdict(profile: FiberProfile, m: int, threshold: Fraction = Fraction(0),
                       full: Fraction = Fraction(99, 100)) -> MjectivityVerdict:
    """Evidence for almost m:1 (some small fiber) and almost surely m:1 (most fibers small)."""
    if m + 1 not in profile.m_range:
        raise ValueError(f"profile lacks diam_{m + 1}")
    hits = sum(1 for s in profile.samples if s.diams[m + 1] <= threshold)
    n = len(profile.samples)
    frac = Fraction(hits, n) if n else Fraction(0)
    side = "full measure" if frac >= full else "bounded away from 1"
    return MjectivityVerdict(m, hits > 0, frac >= full, frac,
                             profile.min_diam(m + 1) if n else Fraction(0), side, n, profile.failures)
