"""Exactly representable Z-systems and their ball / language geometry."""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .definitions import SystemDefinition, definition_from_parser, parse_definition, serialize_definition
from .errors import (DefinitionError, ExtensionError, PrecisionError, RuleParseError,
                     UnsupportedRuleError)
from .odometer import OdometerPoint, OdometerSystem
from .product import ProductSystem
from .rotation import RotationSystem
from .symbolic import (CodingPoint, ComplementPoint, CylinderDiameter, CylinderSet, FixedPoint,
                       FullShift, PeriodicPoint, ShiftedPoint, SturmianSystem, SubstitutionSystem,
                       SymbolicPoint, SymbolicSystem, WordPoint, ball_as_cylinder, complement,
                       cylinder_diam_m, radius_for_delta, shift_cylinder)

THUE_MORSE = "0->01;1->10"


def legal_words(system: SymbolicSystem, length: int) -> frozenset[str]:
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    return system.legal_words(length)


def orbit_segment(system, seed, lo: int, hi: int):
    """Coordinates of ``seed`` on ``lo..hi`` (symbolic) or its orbit points (otherwise)."""
    if isinstance(seed, SymbolicPoint):
        return seed.window(lo, hi)
    return system.orbit(seed, lo, hi)


def _pitch_exponent(pitch: Fraction) -> int:
    pitch = Fraction(pitch)
    if pitch <= 0 or pitch.numerator != 1 or pitch.denominator & (pitch.denominator - 1):
        raise ValueError(f"symbolic net pitch must be 2^-R, got {pitch}")
    return pitch.denominator.bit_length() - 1


def _word_matrix(words: Sequence[str]) -> np.ndarray:
    return np.array([np.frombuffer(w.encode(), dtype=np.uint8) for w in words])


def _symbolic_denseness(system: SymbolicSystem, x: SymbolicPoint, sizes: Sequence[int], R: int):
    L = 2 * R + 1
    net = _word_matrix(sorted(system.legal_words(L)))
    n_max = max(sizes)
    line = x.window(-n_max - R, n_max + R)
    # best[w] = largest agreement radius reached so far (R + 1 means identical)
    best = np.full(len(net), -1, dtype=np.int64)
    seen: set[str] = set()
    # process g in order of |g| so each size is a prefix
    order = sorted(range(-n_max, n_max + 1), key=abs)
    out, j = {}, 0
    rings = [(R - k, R + k) for k in range(R + 1)]
    for n in sorted(sizes):
        batch = []
        while j < len(order) and abs(order[j]) <= n:
            g = order[j] + n_max
            w = line[g:g + L]
            if w not in seen:
                seen.add(w)
                batch.append(w)
            j += 1
        if batch:
            orb = _word_matrix(batch)
            agree = np.ones((len(net), len(orb)), dtype=bool)
            reach = np.full((len(net), len(orb)), R + 1, dtype=np.int64)
            for k, (i1, i2) in enumerate(rings):
                ok = (net[:, None, i1] == orb[None, :, i1]) & (net[:, None, i2] == orb[None, :, i2])
                newly = agree & ~ok
                reach[newly] = k
                agree &= ok
            best = np.maximum(best, reach.max(axis=1))
        worst = int(best.min())
        out[n] = Fraction(0) if worst > R else Fraction(1, 2 ** worst)
    return [out[n] for n in sizes]


def _rotation_denseness(system: RotationSystem, sizes: Sequence[int], pitch: Fraction):
    pitch = Fraction(pitch)
    if pitch.numerator != 1:
        raise ValueError(f"rotation net pitch must be 1/N, got {pitch}")
    N = pitch.denominator
    D = lcm(N, system.q)
    net = np.arange(N, dtype=np.int64) * (D // N)
    nearest = np.full(N, D, dtype=np.int64)
    out, done = {}, -1
    for n in sorted(sizes):
        gs = np.array([g for g in range(-n, n + 1) if abs(g) > done], dtype=np.int64)
        if len(gs):
            orb = (gs * system.p * (D // system.q)) % D
            diff = (net[:, None] - orb[None, :]) % D
            nearest = np.minimum(nearest, np.minimum(diff, D - diff).min(axis=1))
        done = n
        out[n] = Fraction(int(nearest.max()), D)
    return [out[n] for n in sizes]


def denseness_profile(system, x, window_sizes: Sequence[int], net_pitch) -> list[Fraction]:
    """Denseness of the orbit piece over [-n, n] against a finite net, per n.

    Symbolic systems use the net of legal words on [-R, R] with
    ``net_pitch = 2^-R``; rotations use the grid ``x + k * pitch``.
    """
    if isinstance(system, RotationSystem):
        return _rotation_denseness(system, window_sizes, net_pitch)
    if isinstance(system, SymbolicSystem):
        return _symbolic_denseness(system, x, window_sizes, _pitch_exponent(net_pitch))
    raise UnsupportedRuleError(f"denseness not available for {system!r}")


__all__ = [name for name in dir() if not name.startswith("_")]
