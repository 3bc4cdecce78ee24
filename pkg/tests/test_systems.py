import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from multirigid.metrics import circle_distance, denseness, window_metric
from multirigid.oracle import brute_cylinder_diam, oracle_language
from multirigid.systems import (THUE_MORSE, CodingPoint, ComplementPoint, CylinderSet, FixedPoint, FullShift,
                                PeriodicPoint, RotationSystem, RuleParseError, ShiftedPoint, SturmianSystem,
                                SubstitutionSystem, UnsupportedRuleError, WordPoint, ball_as_cylinder,
                                cylinder_diam_m, denseness_profile, legal_words, orbit_segment,
                                radius_for_delta, shift_cylinder)


# -- languages ------------------------------------------------------------------

def test_tm_language_small(tm):
    assert legal_words(tm, 2) == {"00", "01", "10", "11"}
    three = legal_words(tm, 3)
    assert "000" not in three and "111" not in three
    assert len(three) == 6


def test_full_shift_language(full):
    assert len(legal_words(full, 3)) == 8


def test_sturmian_two_fifths():
    # a rational angle p/q gives only q distinct windows once n >= q
    s = SturmianSystem("2/5")
    words = legal_words(s, 5)
    assert words == {"00101", "01001", "01010", "10010", "10100"}
    assert words == oracle_language(s, 5)


@pytest.mark.parametrize("n", [1, 2, 5, 13, 21, 40])
def test_sturmian_complexity_below_period(sturmian, n):
    assert len(legal_words(sturmian, n)) == n + 1
    assert legal_words(sturmian, n) == oracle_language(sturmian, n)


@pytest.mark.parametrize("n", [1, 4, 9, 17, 30])
@pytest.mark.parametrize("rule", [THUE_MORSE, "a->ab;b->aa", "0->001;1->011"])
def test_substitution_language_matches_scan(rule, n):
    s = SubstitutionSystem(rule)
    assert legal_words(s, n) == oracle_language(s, n)


@pytest.mark.parametrize("n", [2, 5, 11])
def test_factor_closed_and_extendable(tm, n):
    words, shorter, longer = legal_words(tm, n), legal_words(tm, n - 1), legal_words(tm, n + 1)
    assert {w[1:] for w in words} | {w[:-1] for w in words} == shorter
    assert {w[1:] for w in longer} == words == {w[:-1] for w in longer}


@pytest.mark.parametrize("rule,err", [
    ("0->", RuleParseError), ("a>b", RuleParseError), ("0->01;0->10", RuleParseError),
    ("0->00;1->11", UnsupportedRuleError), ("0->01;1->11", UnsupportedRuleError),
    ("0->01;1->1", UnsupportedRuleError),
])
def test_bad_rules(rule, err):
    with pytest.raises(err):
        SubstitutionSystem(rule)


def test_zero_length_rejected(tm):
    with pytest.raises(ValueError):
        legal_words(tm, 0)


# -- balls and cylinders --------------------------------------------------------

@pytest.mark.parametrize("delta,radius", [
    (Fraction(1, 4), 2), (Fraction(1), 0), (Fraction(3, 8), 1), (Fraction(1, 1024), 10), (Fraction(2), -1),
])
def test_radius_for_delta(delta, radius):
    assert radius_for_delta(delta) == radius


def test_ball_examples(tm_point):
    assert ball_as_cylinder(tm_point, Fraction(1, 4)) == CylinderSet(-2, 2, tm_point.window(-2, 2), tm_point.system)
    assert ball_as_cylinder(tm_point, 1) == CylinderSet(0, 0, tm_point.window(0, 0), tm_point.system)
    assert ball_as_cylinder(tm_point, 2).is_whole_space


@pytest.mark.parametrize("k", range(0, 6))
def test_ball_matches_pair_sampling(tm, tm_point, k):
    # y lies in the open ball iff d(x, y) < delta, for dyadic and non-dyadic radii
    rng = random.Random(k)
    for delta in (Fraction(1, 2 ** k), Fraction(3, 2 ** (k + 2))):
        c = ball_as_cylinder(tm_point, delta)
        for _ in range(200):
            y = ShiftedPoint(tm_point, rng.randrange(-5000, 5000))
            assert (tm.distance(tm_point, y) < delta) == c.contains(y)


def test_shift_cylinder_examples(tm_point):
    c = ball_as_cylinder(tm_point, Fraction(1, 4))
    assert shift_cylinder(c, 0) == c
    s = shift_cylinder(c, 5)
    assert (s.a, s.b, s.word) == (-7, -3, c.word)
    assert shift_cylinder(s, -5) == c


def test_shift_cylinder_is_image(tm, tm_point):
    c = ball_as_cylinder(tm_point, Fraction(1, 8))
    for g in (-9, 3, 40):
        assert shift_cylinder(c, g).contains(tm.act(tm_point, g))


def test_cylinder_diam_full_shift_free_origin(full):
    c = CylinderSet(5, 9, "01101", full)
    assert cylinder_diam_m(c, 2, 4).value == 1


def test_cylinder_diam_too_few_extensions(full):
    c = CylinderSet(-3, 3, "0000000", full)
    d = cylinder_diam_m(c, 2, 3)
    assert (d.value, d.status) == (0, "exact")


def test_cylinder_diam_inconclusive(tm_point):
    c = ball_as_cylinder(tm_point, Fraction(1, 8))
    d = cylinder_diam_m(c, 3, 4)
    assert d.status == "inconclusive" and d.value == 0


def test_cylinder_diam_frozen(tm_point):
    c = ball_as_cylinder(tm_point, Fraction(1, 8))
    got = [cylinder_diam_m(c, m, 16).value for m in (2, 3, 4, 5)]
    assert got == [Fraction(1, 16), Fraction(1, 32), Fraction(1, 32), Fraction(1, 4096)]


@pytest.mark.parametrize("g", [-13, -4, 0, 3, 8, 21])
@pytest.mark.parametrize("m", [2, 3, 4])
def test_shift_equivariance_against_oracle(tm, tm_point, g, m):
    c = shift_cylinder(ball_as_cylinder(tm_point, Fraction(1, 4)), g)
    assert cylinder_diam_m(c, m, 7).value == brute_cylinder_diam(c, m, 7)


def test_ultrametric_consistency(tm, tm_point):
    c = ball_as_cylinder(tm_point, Fraction(1, 8))
    d2 = cylinder_diam_m(c, 2, 12).value
    members = [ShiftedPoint(tm_point, g) for g in range(-3000, 3000) if c.contains(ShiftedPoint(tm_point, g))]
    dists = [tm.distance(members[0], y) for y in members[1:]]
    assert max(dists) <= d2
    assert d2 in dists


@pytest.mark.parametrize("angle", ["2/5", "5/13", "6765/10946"])
def test_sturmian_counts_match_oracle(angle):
    s = SturmianSystem(angle)
    rng = random.Random(1)
    x = CodingPoint(s, Fraction(1, 3 * s.q))
    for _ in range(20):
        R, r = rng.randrange(0, 4), rng.randrange(0, 3)
        c = ball_as_cylinder(x, Fraction(1, 2 ** R))
        gs = np.array([rng.randrange(-60, 60) for _ in range(8)])
        counts = s.extension_counts(c, r, gs)
        for g, n in zip(gs.tolist(), counts.tolist()):
            lo, hi = min(-R, g - r), max(R, g + r)
            words = oracle_language(s, hi - lo + 1)
            ext = {w[g - r - lo:g + r - lo + 1] for w in words if w[-R - lo:R - lo + 1] == c.word}
            assert n == len(ext)


def test_tm_counts_match_oracle(tm):
    rng = random.Random(5)
    for _ in range(40):
        R, r = rng.randrange(0, 4), rng.randrange(0, 3)
        word = rng.choice(sorted(legal_words(tm, 2 * R + 1)))
        c = CylinderSet(-R, R, word, tm)
        g = rng.randrange(-40, 40)
        lo, hi = min(-R, g - r), max(R, g + r)
        words = oracle_language(tm, hi - lo + 1)
        ext = {w[g - r - lo:g + r - lo + 1] for w in words if w[-R - lo:R - lo + 1] == word}
        assert int(tm.extension_counts(c, r, np.array([g]))[0]) == len(ext)


# -- points and orbits ----------------------------------------------------------

def test_orbit_segments(tm_point, full):
    assert orbit_segment(tm_point.system, tm_point, 0, 7) == "01101001"
    s = SturmianSystem("2/5")
    assert orbit_segment(s, CodingPoint(s, 0), 0, 4) == RotationSystem("2/5").coding(Fraction(0), 0, 4)
    # orbit 0, 2/5, 4/5, 1/5, 3/5 against the cut at 3/5
    assert RotationSystem("2/5").coding(Fraction(0), 0, 4) == "00101"
    assert orbit_segment(full, WordPoint(full, "0110", 0), 0, 3) == "0110"


def test_fixed_point_is_fixed(tm, tm_point):
    # the seed 1.0 is fixed by the square of the rule
    w = tm_point.window(-64, 63)
    assert tm.apply(w, 2)[192:320] == w


def test_complement_point_is_legal(tm, tm_point):
    w = ComplementPoint(tm_point).window(-20, 20)
    assert set(w[i:i + 9] for i in range(33)) <= legal_words(tm, 9)


@given(st.fractions(0, 1, max_denominator=100), st.fractions(0, 1, max_denominator=100), st.integers(-500, 500))
def test_rotation_isometry(x, y, g):
    r = RotationSystem(Fraction(377, 610))
    assert r.distance(r.act(x, g), r.act(y, g)) == r.distance(x, y)


# -- denseness ------------------------------------------------------------------

def test_denseness_tm_monotone(tm_point):
    sizes = [1, 2, 4, 8, 16, 32, 64]
    prof = denseness_profile(tm_point.system, tm_point, sizes, Fraction(1, 16))
    assert all(b <= a for a, b in zip(prof, prof[1:]))
    assert prof[-1] == 0


def test_denseness_tm_frozen(tm_point):
    prof = denseness_profile(tm_point.system, tm_point, [1, 2, 4, 8, 16], Fraction(1, 16))
    assert prof == [Fraction(1, 2), Fraction(1, 2), Fraction(1, 4), Fraction(1, 4), 0]


def test_denseness_symbolic_matches_scan(tm, tm_point):
    R = 3
    net = sorted(legal_words(tm, 2 * R + 1))
    for n in (1, 3, 6):
        orbit = [tm_point.window(g - R, g + R) for g in range(-n, n + 1)]
        want = denseness(orbit, net, window_metric(R))
        assert denseness_profile(tm, tm_point, [n], Fraction(1, 2 ** R)) == [want]


def test_denseness_rotation(rotation):
    sizes = [1, 8, 64, 304, 305, 610]
    prof = denseness_profile(rotation, Fraction(0), sizes, Fraction(1, 610))
    assert all(b <= a for a, b in zip(prof, prof[1:]))
    assert prof[3] > 0 and prof[4] == 0 and prof[5] == 0


def test_denseness_rotation_matches_scan(rotation):
    net = [Fraction(k, 610) for k in range(610)]
    for n in (1, 5, 20):
        orbit = rotation.orbit(Fraction(0), -n, n)
        assert denseness_profile(rotation, Fraction(0), [n], Fraction(1, 610)) == [denseness(orbit, net, circle_distance)]


def test_denseness_full_shift_constant_orbit(full):
    # the orbit of 0^Z is one point; the farthest net word disagrees at the origin
    x = PeriodicPoint(full, "0")
    assert denseness_profile(full, x, [1, 4, 16], Fraction(1, 4)) == [1, 1, 1]
    net = sorted(legal_words(full, 5))
    assert denseness([x.window(-2, 2)], net, window_metric(2)) == 1
