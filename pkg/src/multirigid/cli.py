"""Config-driven experiment runner.

Usage: ``multirigid <task> --config FILE [--out DIR] [--seed N] [--jobs N]``.
The config is INI-style: the ``[system]`` section uses the system-definition
format, and each further section holds one group of knobs.
"""
from __future__ import annotations

import argparse
import configparser
import hashlib
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .density import (DEFAULT_BUDGET, DEFAULT_TOLERANCE, BudgetError, FolnerSchedule, density_bounds,
                      estimate_rows)
from .fibers import (DEFAULT_SAMPLE_DIGITS, RECOGNIZABILITY_MARGIN, OdometerFactor, factor_for,
                     fiber_diam_profile, mjectivity_verdict)
from .reports import ReportError, emit_report, metadata, render_fraction
from .rigidity import (COUNT_CLIP, DEFAULT_MAX_RADIUS, NOT_STABLE_AT, STABLE_AT, TSetIndicator, TSetQuery,
                       judge, sample_cells)
from .systems import (DefinitionError, ExtensionError, PrecisionError, RotationSystem, ShiftedPoint,
                      SymbolicPoint, SymbolicSystem, SystemDefinition, UnsupportedRuleError,
                      ball_as_cylinder, cylinder_diam_m, definition_from_parser, denseness_profile,
                      serialize_definition)

TASKS = ("diam", "density", "tset", "classify", "fibers", "denseness")
INCONCLUSIVE_SHARE = Fraction(1, 10)
U64 = (1 << 64) - 1

COLUMNS = {
    "diam": ["delta", "m", "ballRadius", "diam", "status"],
    "density": ["delta", "epsilon", "m", "windowLength", "plainDensity", "slidingMin", "slidingMax"],
    "tset": ["delta", "epsilon", "m", "g", "member"],
    "classify": ["sample", "m", "epsilon", "delta", "tsetBanachUpper", "tsetStabilized", "aDelta",
                 "unresolvedTimes"],
    "fibers": ["sample", "target", "words", "clusters", "diam2", "diam3", "diam4", "diam5"],
    "denseness": ["n", "denseness"],
}
RATIONAL = {
    "diam": ["delta", "diam"],
    "density": ["delta", "epsilon", "plainDensity", "slidingMin", "slidingMax"],
    "tset": ["delta", "epsilon"],
    "classify": ["epsilon", "delta", "tsetBanachUpper", "aDelta"],
    "fibers": ["diam2", "diam3", "diam4", "diam5"],
    "denseness": ["denseness"],
}

EPILOG = "CSV columns per task:\n" + "\n".join(f"  {t}: {', '.join(c)}" for t, c in COLUMNS.items()) + """

Rational columns carry a <name>Decimal companion. Exit status: 0 on success,
1 on error, 2 when more than 10% of cells are inconclusive."""


# -- config ---------------------------------------------------------------------

def _rational_list(field: str, text: str) -> list[Fraction]:
    """Comma list of rationals; ``2^-a..2^-b`` expands to a dyadic range."""
    out = []
    for item in (t.strip() for t in text.split(",")):
        if not item:
            continue
        try:
            if ".." in item:
                a, b = (int(s.strip().removeprefix("2^")) for s in item.split(".."))
                step = 1 if b >= a else -1
                out.extend(Fraction(2) ** k for k in range(a, b + step, step))
            else:
                out.append(Fraction(item))
        except (ValueError, ZeroDivisionError) as exc:
            raise DefinitionError(field, f"bad entry {item!r}") from exc
    if not out:
        raise DefinitionError(field, "empty list")
    return out


def _int_list(field: str, text: str) -> list[int]:
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise DefinitionError(field, f"not an integer list: {text!r}") from exc
    if not out:
        raise DefinitionError(field, "empty list")
    return out


def _int(cp, section, key, default) -> int:
    raw = cp.get(section, key, fallback=None)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise DefinitionError(f"{section}.{key}", f"not an integer: {raw!r}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    definition: SystemDefinition
    deltas: tuple[Fraction, ...]
    epsilons: tuple[Fraction, ...]
    ms: tuple[int, ...]
    schedule: FolnerSchedule
    budget: int
    tolerance: Fraction
    max_radius: int
    sample_seeds: tuple[str, ...]
    random_shifts: int
    shift_range: int
    tset_range: tuple[int, int]
    fiber_depth: int
    fiber_width: int
    fiber_samples: int
    fiber_digits: int
    sizes: tuple[int, ...]
    pitch: Fraction
    text: str

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()


SECTIONS = {"system", "grids", "schedule", "samples", "tset", "fibers", "denseness"}


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise DefinitionError("file", str(exc)) from exc
    for s in cp.sections():
        if s not in SECTIONS and not s.startswith("system."):
            raise DefinitionError(s, "unknown section")
    defn = definition_from_parser(cp)
    g = "grids"
    deltas = _rational_list("grids.delta", cp.get(g, "delta", fallback="2^-1..2^-10"))
    epsilons = _rational_list("grids.epsilon", cp.get(g, "epsilon", fallback="2^-1..2^-5"))
    ms = _int_list("grids.m", cp.get(g, "m", fallback="2,3,4,5"))
    if any(not 0 < d <= 1 for d in deltas):
        raise DefinitionError("grids.delta", "entries must lie in (0, 1]")
    if any(e <= 0 for e in epsilons):
        raise DefinitionError("grids.epsilon", "entries must be positive")
    if any(m < 2 for m in ms):
        raise DefinitionError("grids.m", "entries must be >= 2")
    s = "schedule"
    if cp.has_option(s, "windows"):
        windows = _int_list("schedule.windows", cp.get(s, "windows"))
    else:
        windows = [1 << k for k in range(_int(cp, s, "min_exponent", 6), _int(cp, s, "max_exponent", 14) + 1)]
    try:
        schedule = FolnerSchedule(tuple(windows))
    except ValueError as exc:
        raise DefinitionError("schedule.windows", str(exc)) from exc
    budget = _int(cp, s, "budget", DEFAULT_BUDGET)
    if budget < schedule.windows[-1] - 1:
        raise DefinitionError("schedule.budget", f"smaller than the largest window {schedule.windows[-1]}")
    tol = _rational_list("schedule.tolerance", cp.get(s, "tolerance", fallback=str(DEFAULT_TOLERANCE)))[0]
    seeds = tuple(t.strip() for t in cp.get("samples", "seeds", fallback="").split(",") if t.strip())
    lo, hi = _int(cp, "tset", "lo", -64), _int(cp, "tset", "hi", 64)
    if hi < lo:
        raise DefinitionError("tset.hi", "must be >= tset.lo")
    pitch = _rational_list("denseness.pitch", cp.get("denseness", "pitch", fallback="1/16"))[0]
    if pitch <= 0:
        raise DefinitionError("denseness.pitch", "must be positive")
    return ExperimentConfig(
        definition=defn, deltas=tuple(deltas), epsilons=tuple(epsilons), ms=tuple(ms),
        schedule=schedule, budget=budget, tolerance=tol,
        max_radius=_int(cp, s, "max_radius", DEFAULT_MAX_RADIUS),
        sample_seeds=seeds, random_shifts=_int(cp, "samples", "shifts", 0),
        shift_range=_int(cp, "samples", "shift_range", 1 << 20), tset_range=(lo, hi),
        fiber_depth=_int(cp, "fibers", "depth", 6), fiber_width=_int(cp, "fibers", "width", 512),
        fiber_samples=_int(cp, "fibers", "samples", 512),
        fiber_digits=_int(cp, "fibers", "digits", DEFAULT_SAMPLE_DIGITS),
        sizes=tuple(_int_list("denseness.sizes", cp.get("denseness", "sizes", fallback="1,2,4,8,16,32,64"))),
        pitch=pitch, text=canonical_text(cp))


def canonical_text(cp: configparser.ConfigParser) -> str:
    lines = []
    for s in sorted(cp.sections()):
        lines.append(f"[{s}]")
        lines.extend(f"{k} = {v.strip()}" for k, v in sorted(cp.items(s)))
        lines.append("")
    return "\n".join(lines)


def knobs(cfg: ExperimentConfig, seed: int) -> dict:
    return {
        "seed": seed,
        "deltas": list(cfg.deltas), "epsilons": list(cfg.epsilons), "ms": list(cfg.ms),
        "windows": list(cfg.schedule.windows), "budget": cfg.budget, "tolerance": cfg.tolerance,
        "maxRadius": cfg.max_radius, "countClip": COUNT_CLIP,
        "notStableAt": NOT_STABLE_AT, "stableAt": STABLE_AT,
        "densityAggregate": "extremum of the last two schedule levels",
        "diamMeanComparison": "strict",
        "unresolvedDiamBound": "2^-(maxRadius+1)",
        "ballConvention": "open ball at delta in (2^-R-1, 2^-R] is the cylinder on [-R, R]",
        "recognizabilityMargin": RECOGNIZABILITY_MARGIN,
        "fiberDepth": cfg.fiber_depth, "fiberWidth": cfg.fiber_width,
        "fiberSamples": cfg.fiber_samples, "fiberDigits": cfg.fiber_digits,
        "inconclusiveShare": INCONCLUSIVE_SHARE,
        "system": serialize_definition(cfg.definition),
    }


# -- samples --------------------------------------------------------------------

def _with_seed(defn: SystemDefinition, seed: str) -> SystemDefinition:
    fields = tuple((k, seed if k == "seed" else v) for k, v in defn.fields)
    if "seed" not in dict(fields):
        raise DefinitionError("samples.seeds", f"kind {defn.kind!r} has no seed field")
    return SystemDefinition(defn.kind, fields, defn.components)


def build_samples(cfg: ExperimentConfig, seed: int):
    """The configured seed point, any extra seeds, then seeded random shifts of the first."""
    system, x0 = cfg.definition.build()
    points = [x0]
    for s in cfg.sample_seeds:
        try:
            points.append(_with_seed(cfg.definition, s).build()[1])
        except DefinitionError as exc:
            raise DefinitionError("samples.seeds", str(exc)) from exc
    rng = np.random.default_rng(seed)
    for g in rng.integers(-cfg.shift_range, cfg.shift_range + 1, size=cfg.random_shifts):
        points.append(ShiftedPoint(x0, int(g)) if isinstance(x0, SymbolicPoint) else system.act(x0, int(g)))
    return system, points


# -- tasks ----------------------------------------------------------------------

@dataclass
class TaskResult:
    rows: list[dict]
    summary: dict
    cells: int
    inconclusive: int


def _symbolic_or_rotation(system):
    if not isinstance(system, (SymbolicSystem, RotationSystem)):
        raise DefinitionError("kind", f"task needs a symbolic or rotation system, got {type(system).__name__}")


def run_diam(cfg: ExperimentConfig, seed: int, jobs: int) -> TaskResult:
    system, x = cfg.definition.build()
    _symbolic_or_rotation(system)
    rows, bad = [], 0
    for delta in cfg.deltas:
        for m in cfg.ms:
            if isinstance(system, RotationSystem):
                rows.append({"delta": delta, "m": m, "ballRadius": "", "diam": system.ball_diam_m(delta, m),
                             "status": "exact"})
                continue
            c = ball_as_cylinder(x, delta)
            try:
                d = cylinder_diam_m(c, m, cfg.max_radius)
                value, status = d.value, d.status
            except (ExtensionError, PrecisionError, BudgetError):
                value, status = None, "inconclusive"
            bad += status != "exact"
            rows.append({"delta": delta, "m": m, "ballRadius": c.b if not c.is_whole_space else -1,
                         "diam": value, "status": status})
    return TaskResult(rows, {"cells": len(rows)}, len(rows), bad)


def _tset_worker(args):
    text, delta, seed, mode = args
    cfg = parse_config(text)
    system, x = cfg.definition.build()
    rows, summary, bad = [], [], 0
    lo, hi = cfg.tset_range
    for eps in cfg.epsilons:
        for m in cfg.ms:
            q = TSetQuery(x, delta, eps, m, system, cfg.schedule, cfg.budget, cfg.max_radius)
            try:
                ind = TSetIndicator(q)
                if mode == "tset":
                    gs = np.arange(lo, hi + 1, dtype=np.int64)
                    for g, v in zip(gs.tolist(), ind(gs).tolist()):
                        rows.append({"delta": delta, "epsilon": eps, "m": m, "g": g, "member": v})
                    continue
                est = density_bounds(ind, cfg.schedule, cfg.budget, cfg.tolerance)
            except (ExtensionError, PrecisionError, BudgetError) as exc:
                bad += 1
                summary.append({"delta": delta, "epsilon": eps, "m": m, "error": str(exc)})
                continue
            for r in estimate_rows(est):
                rows.append({"delta": delta, "epsilon": eps, "m": m, **r})
            summary.append({"delta": delta, "epsilon": eps, "m": m, "upper": est.upper, "lower": est.lower,
                            "banachUpper": est.banach_upper, "banachLower": est.banach_lower,
                            "stabilized": est.stable})
    return rows, summary, bad


def _pool_map(fn, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(a) for a in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def run_density(cfg: ExperimentConfig, seed: int, jobs: int, mode: str = "density") -> TaskResult:
    system, _ = cfg.definition.build()
    _symbolic_or_rotation(system)
    parts = _pool_map(_tset_worker, [(cfg.text, d, seed, mode) for d in cfg.deltas], jobs)
    rows = [r for p in parts for r in p[0]]
    summary = [s for p in parts for s in p[1]]
    n = len(cfg.deltas) * len(cfg.epsilons) * len(cfg.ms)
    return TaskResult(rows, {"cells": summary}, n, sum(p[2] for p in parts))


def _classify_worker(args):
    text, delta, seed = args
    cfg = parse_config(text)
    system, samples = build_samples(cfg, seed)
    try:
        return sample_cells(system, samples, delta, cfg.ms, cfg.epsilons, cfg.schedule, cfg.budget,
                            cfg.max_radius), 0
    except (ExtensionError, PrecisionError, BudgetError):
        return None, len(samples) * len(cfg.ms) * len(cfg.epsilons)


def run_classify(cfg: ExperimentConfig, seed: int, jobs: int) -> TaskResult:
    system, samples = build_samples(cfg, seed)
    _symbolic_or_rotation(system)
    # largest delta first, matching the witness order of the verdicts
    deltas = sorted(set(cfg.deltas), reverse=True)
    parts = _pool_map(_classify_worker, [(cfg.text, d, seed) for d in deltas], jobs)
    cells = [{m: [] for m in cfg.ms} for _ in samples]
    bad = 0
    for got, nbad in parts:
        bad += nbad
        if got is None:
            continue
        for i, per in enumerate(got):
            for m, row in per.items():
                cells[i][m].extend(row)
    res = judge(cells, cfg.ms, cfg.epsilons)
    rows = []
    for i, per in enumerate(res.per_sample):
        for m in cfg.ms:
            for c in per[m].cells:
                rows.append({"sample": i, "m": m, "epsilon": c.epsilon, "delta": c.delta,
                             "tsetBanachUpper": c.tset_banach_upper,
                             "tsetStabilized": "" if c.tset is None else int(c.tset.stable["banachUpper"]),
                             "aDelta": c.a_delta, "unresolvedTimes": c.unresolved_diam})
    summary = {
        "frequentlyStable": {str(m): v for m, v in res.frequently_stable.items()},
        "diamMean": {str(m): v for m, v in res.diam_mean.items()},
        "samples": [_describe(p) for p in samples],
        "perSample": [{str(m): {"frequentlyStable": v.frequently_stable,
                                "diamMean": v.diam_mean_equicontinuous,
                                "stableWitness": v.witness("stable"),
                                "diamMeanWitness": v.witness("diam_mean")} for m, v in per.items()}
                      for per in res.per_sample],
    }
    n = len(samples) * len(cfg.ms) * len(cfg.epsilons) * len(deltas)
    return TaskResult(rows, summary, n, bad)


def _describe(p) -> str:
    return render_fraction(p) if isinstance(p, Fraction) else repr(p)


def _target_text(y) -> str:
    if isinstance(y, Fraction):
        return render_fraction(y)
    return "".join(str(d) for d in y.digits)


def run_fibers(cfg: ExperimentConfig, seed: int, jobs: int) -> TaskResult:
    system, _ = cfg.definition.build()
    try:
        fmap = factor_for(system)
    except TypeError as exc:
        raise DefinitionError("kind", str(exc)) from exc
    if isinstance(fmap, OdometerFactor):
        targets = fmap.sample_targets(cfg.fiber_samples, seed, cfg.fiber_digits)
    else:
        targets = fmap.sample_targets(cfg.fiber_samples, seed)
    m_range = (2, 3, 4, 5)
    prof = fiber_diam_profile(fmap, targets, cfg.fiber_depth, cfg.fiber_width, m_range)
    rows = [{"sample": i, "target": _target_text(s.target), "words": len(s.words), "clusters": s.n_clusters,
             **{f"diam{m}": s.diams[m] for m in m_range}} for i, s in enumerate(prof.samples)]
    verdicts = {}
    for m in (1, 2, 3, 4):
        v = mjectivity_verdict(prof, m)
        verdicts[str(m)] = {"almost": v.almost, "almostSurely": v.almost_surely, "fraction": v.fraction,
                            "minDiam": v.min_diam, "dichotomy": v.dichotomy}
    counts: dict[str, int] = {}
    for s in prof.samples:
        counts[str(s.n_clusters)] = counts.get(str(s.n_clusters), 0) + 1
    summary = {"mjectivity": verdicts, "clusterCounts": counts, "failures": prof.failures,
               "samples": len(targets)}
    return TaskResult(rows, summary, len(targets), prof.failures)


def run_denseness(cfg: ExperimentConfig, seed: int, jobs: int) -> TaskResult:
    system, x = cfg.definition.build()
    try:
        vals = denseness_profile(system, x, list(cfg.sizes), cfg.pitch)
    except (ValueError, UnsupportedRuleError) as exc:
        raise DefinitionError("denseness.pitch", str(exc)) from exc
    rows = [{"n": n, "denseness": v} for n, v in zip(cfg.sizes, vals)]
    monotone = all(b <= a for a, b in zip(vals, vals[1:]))
    return TaskResult(rows, {"monotone": monotone}, len(rows), 0)


RUNNERS = {
    "diam": run_diam,
    "density": run_density,
    "tset": lambda cfg, seed, jobs: run_density(cfg, seed, jobs, "tset"),
    "classify": run_classify,
    "fibers": run_fibers,
    "denseness": run_denseness,
}


def run(task: str, cfg: ExperimentConfig, out: Path, seed: int = 0, jobs: int = 1) -> tuple[int, dict]:
    """Execute ``task`` and write ``<task>.json`` and ``<task>.csv``; returns (exit status, payload)."""
    result = RUNNERS[task](cfg, seed, jobs)
    share = Fraction(result.inconclusive, result.cells) if result.cells else Fraction(0)
    status = 2 if share > INCONCLUSIVE_SHARE else 0
    payload = {"task": task, "result": result.summary, "inconclusiveCells": result.inconclusive,
               "totalCells": result.cells, "metadata": metadata(cfg.text, cfg.sha256, knobs(cfg, seed))}
    emit_report(out, task, "json", payload)
    emit_report(out, task, "csv", columns=COLUMNS[task], rows=result.rows, rational=RATIONAL[task])
    return status, payload


# -- entry point ----------------------------------------------------------------

def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v <= U64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("jobs must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="multirigid", description=__doc__.splitlines()[0], epilog=EPILOG,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("task", choices=TASKS)
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", type=Path, default=Path("reports"))
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--jobs", type=_positive, default=1)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text()
    except OSError as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text)
        status, payload = run(args.task, cfg, args.out, args.seed, args.jobs)
    except DefinitionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if status == 2:
        print(f"inconclusive: {payload['inconclusiveCells']} of {payload['totalCells']} cells", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
