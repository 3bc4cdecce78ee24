"""Window estimators for F-density and F-Banach density of subsets of Z.

Windows are the intervals ``[0, N)`` of a :class:`FolnerSchedule`.  Banach
estimates scan every length-N window inside a support budget ``[-S, S]``.
All outputs are exact ``Fraction`` values.

Limits are never claimed: each aggregate is the extremum over the last two
schedule levels, and ``stabilized`` says whether those two levels agree
within the caller's tolerance.  Taking max for upper and min for lower
quantities keeps the chain inequality and complement duality exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

DEFAULT_BUDGET = 1 << 17
DEFAULT_TOLERANCE = Fraction(1, 100)


class DomainError(ValueError):
    pass


class BudgetError(ValueError):
    pass


@dataclass(frozen=True)
class FolnerSchedule:
    windows: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(n) for n in self.windows)
        if not w:
            raise DomainError("schedule is empty")
        if w[0] <= 0 or any(b <= a for a, b in zip(w, w[1:])):
            raise DomainError(f"window lengths must be positive and strictly increasing: {w}")
        object.__setattr__(self, "windows", w)

    @classmethod
    def dyadic(cls, lo: int = 6, hi: int = 14) -> "FolnerSchedule":
        return cls(tuple(1 << k for k in range(lo, hi + 1)))

    def folner_ratio(self, t: int) -> list[Fraction]:
        """|[0,N) symmetric-difference (t + [0,N))| / N per level."""
        return [Fraction(2 * min(abs(t), n), n) for n in self.windows]


@dataclass(frozen=True)
class WindowRecord:
    length: int
    plain: Fraction
    sliding_min: Fraction
    sliding_max: Fraction


@dataclass(frozen=True)
class DensityEstimate:
    per_window: tuple[WindowRecord, ...]
    upper: Fraction
    lower: Fraction
    banach_upper: Fraction
    banach_lower: Fraction
    stable: dict = field(default_factory=dict)
    budget: int = DEFAULT_BUDGET
    tolerance: Fraction = DEFAULT_TOLERANCE

    @property
    def schedule(self) -> tuple[int, ...]:
        return tuple(r.length for r in self.per_window)

    @property
    def stabilized(self) -> bool:
        return all(self.stable.values())

    def chain_holds(self) -> bool:
        if not (self.banach_lower <= self.lower <= self.upper <= self.banach_upper):
            return False
        return all(r.sliding_min <= r.plain <= r.sliding_max for r in self.per_window)


def evaluate_indicator(indicator: Callable, gs: np.ndarray) -> np.ndarray:
    """Call ``indicator`` on an int array, falling back to a per-point loop."""
    try:
        out = np.asarray(indicator(gs))
        if out.shape == gs.shape:
            return out.astype(np.int64)
    except (TypeError, ValueError):
        pass
    return np.fromiter((int(bool(indicator(int(g)))) for g in gs), dtype=np.int64, count=len(gs))


def window_density(indicator: Callable, start: int, stop: int) -> Fraction:
    """Fraction of ``g`` in ``[start, stop)`` with ``indicator(g) == 1``."""
    if stop <= start:
        raise DomainError(f"empty window [{start}, {stop})")
    vals = evaluate_indicator(indicator, np.arange(start, stop, dtype=np.int64))
    return Fraction(int(vals.sum()), stop - start)


def _aggregate(values: Sequence[Fraction], pick, tol: Fraction) -> tuple[Fraction, bool]:
    tail = list(values[-2:])
    return pick(tail), len(tail) == 2 and abs(tail[1] - tail[0]) <= tol


def bounds_from_values(values: np.ndarray, schedule: FolnerSchedule, budget: int,
                       scale: int = 1, tolerance: Fraction = DEFAULT_TOLERANCE) -> DensityEstimate:
    """Estimates for a weight sequence given on ``[-budget, budget]``.

    ``values`` holds integers in ``[0, scale]``; the sequence is ``values / scale``.
    """
    values = np.asarray(values, dtype=np.int64)
    if len(values) != 2 * budget + 1:
        raise DomainError(f"expected {2 * budget + 1} values for budget {budget}, got {len(values)}")
    csum = np.concatenate(([0], np.cumsum(values)))
    records = []
    for n in schedule.windows:
        if n > budget + 1:
            raise BudgetError(f"window {n} does not fit the support budget [-{budget}, {budget}]")
        sums = csum[n:] - csum[:-n]
        den = n * scale
        records.append(WindowRecord(
            n, Fraction(int(sums[budget]), den),
            Fraction(int(sums.min()), den), Fraction(int(sums.max()), den)))
    up, s1 = _aggregate([r.plain for r in records], max, tolerance)
    lo, s2 = _aggregate([r.plain for r in records], min, tolerance)
    bu, s3 = _aggregate([r.sliding_max for r in records], max, tolerance)
    bl, s4 = _aggregate([r.sliding_min for r in records], min, tolerance)
    stable = {"upper": s1, "lower": s2, "banachUpper": s3, "banachLower": s4}
    return DensityEstimate(tuple(records), up, lo, bu, bl, stable, budget, tolerance)


def density_bounds(indicator: Callable, schedule: FolnerSchedule, budget: int = DEFAULT_BUDGET,
                   tolerance: Fraction = DEFAULT_TOLERANCE) -> DensityEstimate:
    if budget < schedule.windows[-1] - 1:
        raise BudgetError(f"budget {budget} smaller than largest window {schedule.windows[-1]}")
    gs = np.arange(-budget, budget + 1, dtype=np.int64)
    return bounds_from_values(evaluate_indicator(indicator, gs), schedule, budget, 1, tolerance)


def complement_duality_check(est: DensityEstimate, comp: DensityEstimate) -> bool:
    if est.schedule != comp.schedule or est.budget != comp.budget:
        raise DomainError("estimates come from different schedules or budgets")
    for a, b in zip(est.per_window, comp.per_window):
        if a.plain + b.plain != 1 or a.sliding_max + b.sliding_min != 1 or a.sliding_min + b.sliding_max != 1:
            return False
    return est.upper + comp.lower == 1 and est.banach_upper + comp.banach_lower == 1


def estimate_rows(est: DensityEstimate) -> list[dict]:
    return [{"windowLength": r.length, "plainDensity": r.plain,
             "slidingMin": r.sliding_min, "slidingMax": r.sliding_max} for r in est.per_window]
