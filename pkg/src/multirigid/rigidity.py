"""Stability time-sets, diam-mean averages, proximality scans and verdicts.

For a subshift, ``diam_m(sigma^g B_delta(x)) > eps`` reduces to a count of
window restrictions: with r_eps the largest r such that 2^-r > eps, the
time g is in the T-set iff at least m distinct words occur on
``[g - r_eps, g + r_eps]`` among points of the ball.  Rotations are
isometries, so the T-set is either empty or everything.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .density import (DEFAULT_BUDGET, DEFAULT_TOLERANCE, DensityEstimate, FolnerSchedule,
                      bounds_from_values)
from .metrics import d_m
from .systems import RotationSystem, SymbolicPoint, SymbolicSystem, ball_as_cylinder

DEFAULT_DELTAS = tuple(Fraction(1, 2 ** k) for k in range(1, 11))
DEFAULT_EPSILONS = tuple(Fraction(1, 2 ** j) for j in range(1, 6))
DEFAULT_MS = (2, 3, 4, 5)
NOT_STABLE_AT = Fraction(99, 100)
STABLE_AT = Fraction(9, 10)
DEFAULT_MAX_RADIUS = 24
COUNT_CLIP = 255


class RigidityError(ValueError):
    pass


def epsilon_radius(eps) -> int | None:
    """Largest r >= 0 with 2^-r > eps, or None when eps >= 1."""
    eps = Fraction(eps)
    if eps <= 0:
        raise RigidityError(f"epsilon must be positive, got {eps}")
    if eps >= 1:
        return None
    r = 0
    while Fraction(1, 2 ** (r + 1)) > eps:
        r += 1
    return r


@dataclass(frozen=True)
class TSetQuery:
    x: object
    delta: Fraction
    epsilon: Fraction
    m: int
    system: object = None
    schedule: FolnerSchedule = field(default_factory=FolnerSchedule.dyadic)
    budget: int = DEFAULT_BUDGET
    max_radius: int = DEFAULT_MAX_RADIUS

    def __post_init__(self):
        if self.m < 2:
            raise RigidityError(f"m must be >= 2, got {self.m}")
        # delta > 1 is allowed and gives the whole space
        if Fraction(self.delta) <= 0:
            raise RigidityError(f"delta must be positive, got {self.delta}")
        if Fraction(self.epsilon) <= 0:
            raise RigidityError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def resolved_system(self):
        if self.system is not None:
            return self.system
        if isinstance(self.x, SymbolicPoint):
            return self.x.system
        raise RigidityError("query needs an explicit system for non-symbolic points")


class CountTable:
    """Memoized extension counts N(r, g) for one ball, over ``[-budget, budget]``.

    Counts are clipped at 255; m stays far below that.
    """

    def __init__(self, x: SymbolicPoint, delta, budget: int):
        self.x, self.delta, self.budget = x, Fraction(delta), budget
        self.cylinder = ball_as_cylinder(x, self.delta)
        self.gs = np.arange(-budget, budget + 1, dtype=np.int64)
        self._rows: dict[int, np.ndarray] = {}

    def counts(self, r: int) -> np.ndarray:
        row = self._rows.get(r)
        if row is None:
            raw = self.x.system.extension_counts(self.cylinder, r, self.gs)
            row = np.minimum(raw, COUNT_CLIP).astype(np.uint8)
            row.setflags(write=False)
            self._rows[r] = row
        return row

    def radii(self, m: int, max_radius: int) -> np.ndarray:
        """Least r with N(r) >= m per g, or -1 when none up to ``max_radius``."""
        if m > COUNT_CLIP - 1:
            raise RigidityError(f"m={m} exceeds the count clip")
        out = np.full(len(self.gs), -1, dtype=np.int64)
        for r in range(max_radius + 1):
            todo = out < 0
            if not todo.any():
                break
            hit = todo & (self.counts(r) >= m)
            out[hit] = r
        return out


class TSetIndicator:
    """Callable g -> {0,1}; ``inconclusive`` marks times a radius cap blocked."""

    def __init__(self, query: TSetQuery, table: CountTable | None = None):
        self.query = query
        system = query.resolved_system
        self.kind = "rotation" if isinstance(system, RotationSystem) else "symbolic"
        if self.kind == "rotation":
            self.constant = int(system.ball_diam_m(query.delta, query.m) > query.epsilon)
            return
        if not isinstance(system, SymbolicSystem):
            raise RigidityError(f"T-sets not available for {system!r}")
        self.r_eps = epsilon_radius(query.epsilon)
        self.table = table
        self.cylinder = ball_as_cylinder(query.x, query.delta)

    def __call__(self, g):
        gs = np.asarray(g, dtype=np.int64)
        if self.kind == "rotation":
            return np.full(gs.shape, self.constant, dtype=np.int64)
        if self.r_eps is None:
            return np.zeros(gs.shape, dtype=np.int64)
        if self.table is not None and gs.shape == self.table.gs.shape and np.array_equal(gs, self.table.gs):
            n = self.table.counts(self.r_eps)
        else:
            n = self.query.x.system.extension_counts(self.cylinder, self.r_eps, gs.ravel()).reshape(gs.shape)
        return (n >= self.query.m).astype(np.int64)

    def inconclusive(self, g) -> np.ndarray:
        # membership needs only a finite window count, so it is always decided
        return np.zeros(np.shape(g), dtype=bool)


def t_set_indicator(query: TSetQuery) -> TSetIndicator:
    return TSetIndicator(query)


@dataclass(frozen=True)
class DiamProfile:
    """Per-time exponents r* (diam = 2^-r*); -1 where the cap was hit."""

    exponents: np.ndarray
    max_radius: int

    @property
    def unresolved(self) -> int:
        return int((self.exponents < 0).sum())

    def scaled_values(self) -> tuple[np.ndarray, int]:
        """Integer weights and scale; capped times use the bound 2^-(max_radius+1)."""
        scale = 1 << (self.max_radius + 1)
        e = self.exponents
        vals = np.where(e >= 0, np.left_shift(1, self.max_radius + 1 - np.maximum(e, 0)), 1)
        return vals.astype(np.int64), scale


def diam_mean_average(query: TSetQuery, table: CountTable | None = None) -> tuple[Fraction, DensityEstimate | None, int]:
    """A_delta: Banach-upper window average of g -> diam_m(sigma^g B_delta(x)).

    Returns ``(value, estimate, unresolved_count)``.  The estimate is None for
    rotations, where the average equals the constant ball diameter.
    """
    system = query.resolved_system
    if isinstance(system, RotationSystem):
        return system.ball_diam_m(query.delta, query.m), None, 0
    table = table or CountTable(query.x, query.delta, query.budget)
    prof = DiamProfile(table.radii(query.m, query.max_radius), query.max_radius)
    vals, scale = prof.scaled_values()
    est = bounds_from_values(vals, query.schedule, query.budget, scale)
    return est.banach_upper, est, prof.unresolved


def proximality_scan(system, points: Sequence, lo: int, hi: int) -> Fraction:
    """min over g in lo..hi of d_m of the g-translates; a finite-window upper bound."""
    if len(points) < 2:
        raise RigidityError("need at least two points")
    return min(d_m([system.act(p, g) for p in points], system.distance) for g in range(lo, hi + 1))


# -- verdicts -------------------------------------------------------------------

@dataclass
class Cell:
    m: int
    epsilon: Fraction
    delta: Fraction
    tset: DensityEstimate | None
    tset_banach_upper: Fraction
    a_delta: Fraction
    inconclusive: int = 0
    unresolved_diam: int = 0


@dataclass
class EpsilonVerdict:
    epsilon: Fraction
    stable_delta: Fraction | None
    not_stable: bool
    diam_mean_delta: Fraction | None

    @property
    def stable(self) -> bool | None:
        if self.stable_delta is not None:
            return True
        if self.not_stable:
            return False
        return None


@dataclass
class RigidityVerdict:
    m: int
    cells: list[Cell]
    per_epsilon: list[EpsilonVerdict]
    frequently_stable: bool | None
    diam_mean_equicontinuous: bool | None

    def witness(self, kind: str) -> dict:
        key = "stable_delta" if kind == "stable" else "diam_mean_delta"
        return {str(v.epsilon): getattr(v, key) for v in self.per_epsilon}


def _judge(m: int, cells: list[Cell], eps_grid: Sequence[Fraction]) -> RigidityVerdict:
    per = []
    for eps in eps_grid:
        row = [c for c in cells if c.epsilon == eps]
        stable_delta = next((c.delta for c in row if c.tset_banach_upper <= STABLE_AT
                             and (c.tset is None or c.tset.stable["banachUpper"])), None)
        not_stable = all(c.tset_banach_upper >= NOT_STABLE_AT for c in row)
        dm_delta = next((c.delta for c in row if c.tset_banach_upper < eps and c.a_delta < eps), None)
        per.append(EpsilonVerdict(eps, stable_delta, not_stable, dm_delta))
    if all(v.stable for v in per):
        fs = True
    elif any(v.stable is False for v in per):
        fs = False
    else:
        fs = None
    dm = all(v.diam_mean_delta is not None for v in per)
    return RigidityVerdict(m, cells, per, fs, dm)


def _delta_cells(system, x, delta: Fraction, m_range, eps_grid, schedule, budget, max_radius,
                 with_average: bool = True) -> dict[int, list[Cell]]:
    table = None if isinstance(system, RotationSystem) else CountTable(x, delta, budget)
    out: dict[int, list[Cell]] = {}
    for m in m_range:
        a_delta, unresolved = Fraction(1), 0
        if with_average:
            q0 = TSetQuery(x, delta, eps_grid[0], m, system, schedule, budget, max_radius)
            a_delta, _, unresolved = diam_mean_average(q0, table)
        row = []
        for eps in eps_grid:
            ind = TSetIndicator(TSetQuery(x, delta, eps, m, system, schedule, budget, max_radius), table)
            if ind.kind == "rotation":
                est, value = None, Fraction(ind.constant)
            else:
                est = bounds_from_values(ind(table.gs), schedule, budget, 1, DEFAULT_TOLERANCE)
                value = est.banach_upper
            row.append(Cell(m, eps, delta, est, value, a_delta, 0, unresolved))
        out[m] = row
    return out


def _grids(eps_grid, delta_grid, schedule):
    eps_grid = [Fraction(e) for e in eps_grid]
    delta_grid = sorted((Fraction(d) for d in delta_grid), reverse=True)
    if not eps_grid or not delta_grid:
        raise RigidityError("grids must be nonempty")
    return eps_grid, delta_grid, schedule or FolnerSchedule.dyadic()


def analyze_point(system, x, m_range: Iterable[int] = DEFAULT_MS,
                  eps_grid: Sequence = DEFAULT_EPSILONS, delta_grid: Sequence = DEFAULT_DELTAS,
                  schedule: FolnerSchedule | None = None, budget: int = DEFAULT_BUDGET,
                  max_radius: int = DEFAULT_MAX_RADIUS, with_average: bool = True) -> dict[int, RigidityVerdict]:
    """All (m, eps, delta) cells for one point, plus per-m verdicts."""
    return classify(system, [x], m_range, eps_grid, delta_grid, schedule, budget, max_radius,
                    with_average).per_sample[0]


def frequent_stability_estimate(system, x, m: int, eps_grid=DEFAULT_EPSILONS, delta_grid=DEFAULT_DELTAS,
                                schedule: FolnerSchedule | None = None, budget: int = DEFAULT_BUDGET,
                                max_radius: int = DEFAULT_MAX_RADIUS) -> RigidityVerdict:
    return analyze_point(system, x, [m], eps_grid, delta_grid, schedule, budget, max_radius)[m]


@dataclass
class Classification:
    per_sample: list[dict[int, RigidityVerdict]]
    frequently_stable: dict[int, bool | str | None]
    diam_mean: dict[int, bool | str | None]


def _merge(values: list) -> bool | str | None:
    first = values[0]
    return first if all(v == first for v in values) else "inconsistent"


def sample_cells(system, samples: Sequence, delta, m_range: Iterable[int] = DEFAULT_MS,
                 eps_grid=DEFAULT_EPSILONS, schedule: FolnerSchedule | None = None,
                 budget: int = DEFAULT_BUDGET, max_radius: int = DEFAULT_MAX_RADIUS,
                 with_average: bool = True) -> list[dict[int, list[Cell]]]:
    """Cells at one delta, per sample; the unit of work for parallel runs."""
    eps_grid, _, schedule = _grids(eps_grid, [delta], schedule)
    return [_delta_cells(system, x, Fraction(delta), list(m_range), eps_grid, schedule, budget,
                         max_radius, with_average) for x in samples]


def judge(cells: list[dict[int, list[Cell]]], m_range: Iterable[int], eps_grid=DEFAULT_EPSILONS) -> Classification:
    """Per-m verdicts, declared only when every sample agrees."""
    m_range = list(m_range)
    eps_grid = [Fraction(e) for e in eps_grid]
    for c in cells:
        for m in m_range:
            c[m].sort(key=lambda cell: (-cell.delta, -cell.epsilon))
    per = [{m: _judge(m, c[m], eps_grid) for m in m_range} for c in cells]
    fs = {m: _merge([p[m].frequently_stable for p in per]) for m in m_range}
    dm = {m: _merge([p[m].diam_mean_equicontinuous for p in per]) for m in m_range}
    return Classification(per, fs, dm)


def classify(system, samples: Sequence, m_range: Iterable[int] = DEFAULT_MS,
             eps_grid=DEFAULT_EPSILONS, delta_grid=DEFAULT_DELTAS,
             schedule: FolnerSchedule | None = None, budget: int = DEFAULT_BUDGET,
             max_radius: int = DEFAULT_MAX_RADIUS, with_average: bool = True) -> Classification:
    """Per-m verdicts over a set of sample points."""
    if not samples:
        raise RigidityError("classify needs at least one sample point")
    m_range = list(m_range)
    eps_grid, delta_grid, schedule = _grids(eps_grid, delta_grid, schedule)
    cells = [{m: [] for m in m_range} for _ in samples]
    # delta outermost: samples share ball radii, so the pair engine memo stays warm
    for delta in delta_grid:
        for i, got in enumerate(sample_cells(system, samples, delta, m_range, eps_grid, schedule,
                                             budget, max_radius, with_average)):
            for m, row in got.items():
                cells[i][m].extend(row)
    return judge(cells, m_range, eps_grid)
