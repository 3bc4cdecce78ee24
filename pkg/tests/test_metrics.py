import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from multirigid.metrics import (EmptySetError, InvalidArityError, circle_distance, covering_value_em, d_m,
                                d_m_argmin, denseness, diam_m, diam_m_witness, diameter, directed_distance,
                                hausdorff_distance, line_distance, polygon_holds, sequence_distance,
                                window_metric)
from multirigid.oracle import brute_diam_m

rationals = st.fractions(min_value=0, max_value=1, max_denominator=64).map(lambda f: f % 1)
circle_sets = st.lists(rationals, min_size=1, max_size=9)


def test_d_m_circle_triple():
    assert d_m([Fraction(0), Fraction(1, 5), Fraction(1, 2)], circle_distance) == Fraction(1, 5)


def test_d_m_repeated_point_is_zero():
    assert d_m([Fraction(1, 3)] * 4, circle_distance) == 0


def test_d_m_sequences():
    # x, y first differ at index 2; z differs from both at 0
    x, y, z = "00000", "10001", "00100"
    dist = window_metric(2)
    assert sorted(dist(a, b) for a, b in [(x, y), (x, z), (y, z)]) == [Fraction(1, 4), 1, 1]
    assert d_m([x, y, z], dist) == Fraction(1, 4)


def test_d_m_arity():
    with pytest.raises(InvalidArityError):
        d_m([Fraction(0)], circle_distance)
    with pytest.raises(InvalidArityError):
        diam_m([Fraction(0)], 1, circle_distance)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_diam_m_integer_points(m):
    assert diam_m([Fraction(i) for i in range(1, m + 1)], m, line_distance) == 1


@pytest.mark.parametrize("m", [2, 3, 5])
def test_diam_m_singleton(m):
    assert diam_m([Fraction(1, 7)], m, circle_distance) == 0


def test_diam_m_empty():
    with pytest.raises(EmptySetError):
        diam_m([], 2, circle_distance)


def test_diam_m_random_circle_matches_oracle():
    rng = random.Random(3)
    pts = [Fraction(rng.randrange(1000), 1000) for _ in range(50)]
    assert diam_m(pts, 3, circle_distance) == brute_diam_m(pts, 3, circle_distance)


@given(circle_sets, st.integers(2, 4))
def test_diam_m_matches_oracle(pts, m):
    assert diam_m(pts, m, circle_distance) == brute_diam_m(pts, m, circle_distance)


@given(circle_sets)
def test_diam_2_is_diameter(pts):
    assert diam_m(pts, 2, circle_distance) == diameter(pts, circle_distance)


@given(circle_sets, circle_sets, st.integers(2, 4))
def test_monotone_under_inclusion(a, b, m):
    assert diam_m(a, m, circle_distance) <= diam_m(a + b, m, circle_distance)


@given(st.lists(rationals, min_size=2, max_size=5), rationals)
def test_polygon_inequality(pts, z):
    assert polygon_holds(pts, z, circle_distance)


@given(circle_sets, st.integers(2, 4))
def test_witness_attains_value(pts, m):
    value, idx = diam_m_witness(pts, m, circle_distance)
    assert value == diam_m(pts, m, circle_distance)
    if idx is not None:
        assert d_m([pts[i] for i in idx], circle_distance) == value


def test_witness_is_lexicographically_first():
    pts = [Fraction(0), Fraction(1, 2), Fraction(1, 4), Fraction(3, 4)]
    assert diam_m_witness(pts, 2, circle_distance) == (Fraction(1, 2), (0, 1))


def test_argmin_pair():
    assert d_m_argmin([Fraction(0), Fraction(1, 2), Fraction(1, 10)], circle_distance) == (0, 2)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_em_interval_and_discrete(m):
    pitch = Fraction(1, 8)
    grid = [1 + k * pitch for k in range(int((m - 1) / pitch) + 1)]
    e = covering_value_em(grid, m, grid, line_distance)
    assert abs(e - Fraction(1, 2)) <= pitch
    assert diam_m(grid, m, line_distance) == 1
    discrete = [Fraction(i) for i in range(1, m + 1)]
    assert covering_value_em(discrete, m, discrete, line_distance) == 1


def test_em_too_few_centers():
    with pytest.raises(EmptySetError):
        covering_value_em([Fraction(0)], 4, [Fraction(0), Fraction(1, 2)], circle_distance)


def test_em_sandwich_random_set():
    rng = random.Random(11)
    pts = [Fraction(rng.randrange(64), 64) for _ in range(30)]
    net = [Fraction(k, 64) for k in range(64)]
    v = covering_value_em(pts, 3, net, circle_distance)
    assert v <= diam_m(pts, 3, circle_distance) <= 2 * v


@given(st.lists(st.integers(0, 31), min_size=1, max_size=8), st.integers(2, 3))
def test_em_sandwich(idx, m):
    pts = [Fraction(i, 32) for i in idx]
    net = [Fraction(k, 32) for k in range(32)]
    v = covering_value_em(pts, m, net, circle_distance)
    assert v <= diam_m(pts, m, circle_distance) <= 2 * v


def test_hausdorff_examples():
    a = [Fraction(0), Fraction(1, 3)]
    assert hausdorff_distance(a, a, circle_distance) == 0
    assert hausdorff_distance([Fraction(0)], [Fraction(0), Fraction(1, 2)], circle_distance) == Fraction(1, 2)
    with pytest.raises(EmptySetError):
        hausdorff_distance([], a, circle_distance)


@given(circle_sets, circle_sets)
def test_hausdorff_matches_double_loop(a, b):
    ab = max(min(circle_distance(x, y) for y in b) for x in a)
    ba = max(min(circle_distance(x, y) for y in a) for x in b)
    assert hausdorff_distance(a, b, circle_distance) == max(ab, ba)
    assert directed_distance(a, b, circle_distance) == ab


def test_denseness_examples():
    net = [Fraction(k, 8) for k in range(8)]
    assert denseness(net, net, circle_distance) == 0
    assert denseness([Fraction(0)], net, circle_distance) == Fraction(1, 2)


@given(st.sets(st.integers(0, 15), min_size=1))
def test_denseness_subset_of_net(idx):
    net = [Fraction(k, 16) for k in range(16)]
    a = [Fraction(i, 16) for i in sorted(idx)]
    assert denseness(a, net, circle_distance) == max(min(circle_distance(x, y) for y in a) for x in net)
    assert denseness(a, net, circle_distance) == hausdorff_distance(a, net, circle_distance)


@given(circle_sets, st.integers(2, 4), st.integers(1, 6))
def test_denseness_transfer(a, m, k):
    # every point of b lies within eps of a
    eps = Fraction(1, 2 ** k)
    b = [(x + eps / 2) % 1 for x in a] + a
    assert diam_m(a, m, circle_distance) >= diam_m(b, m, circle_distance) - 2 * eps


def test_sequence_distance():
    assert sequence_distance("0110", "0110", 1) == 0
    assert sequence_distance("0110", "0100", 1) == Fraction(1, 2)
    assert sequence_distance("0110", "1110", 1) == Fraction(1, 2)
    assert sequence_distance("0110", "0010", 1) == 1


@given(st.lists(st.text("01", min_size=7, max_size=7), min_size=3, max_size=3))
def test_sequence_metric_is_ultrametric(ws):
    dist = window_metric(3)
    x, y, z = ws
    assert dist(x, y) == dist(y, x)
    assert dist(x, x) == 0
    assert dist(x, z) <= max(dist(x, y), dist(y, z))


@pytest.mark.parametrize("words", [["".join(p) for p in product("01", repeat=3)]])
def test_sequence_diam_levels(words):
    dist = window_metric(1)
    assert [diam_m(words, m, dist) for m in (2, 3, 8, 9)] == [1, Fraction(1, 2), Fraction(1, 2), 0]
