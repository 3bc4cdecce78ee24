from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from multirigid.systems import (CodingPoint, DefinitionError, FixedPoint, FullShift, OdometerPoint,
                                PeriodicPoint, ProductSystem, RotationSystem, SturmianSystem, SubstitutionSystem,
                                parse_definition, serialize_definition)

TM_TEXT = """
[system]
kind = substitution
rule = 0 -> 01 ; 1 -> 10
seed = 1.0
"""

PRODUCT_TEXT = """
[system]
kind = product
components = left, right

[system.left]
kind = rotation
angle = 377/610

[system.right]
kind = odometer
seed = 0110
"""


def test_substitution_builds(tm):
    system, x = parse_definition(TM_TEXT).build()
    assert system == tm
    assert isinstance(x, FixedPoint) and x.window(0, 7) == "01101001"


def test_canonical_rule_spelling():
    assert parse_definition(TM_TEXT).get("rule") == "0->01;1->10"


@pytest.mark.parametrize("text", [
    TM_TEXT, PRODUCT_TEXT,
    "[system]\nkind = sturmian\nangle = 6765/10946\nseed = 1/7\nconvention = right\n",
    "[system]\nkind = rotation\nangle = 0.4\n",
    "[system]\nkind = fullshift\nalphabet = 012\nseed = 201\n",
    "[system]\nkind = odometer\n",
])
def test_round_trip(text):
    d = parse_definition(text)
    s = serialize_definition(d)
    assert parse_definition(s) == d
    assert serialize_definition(parse_definition(s)) == s


@given(st.fractions(min_value=0, max_value=1, max_denominator=10 ** 5).filter(lambda f: 0 < f < 1),
       st.fractions(min_value=0, max_value=1, max_denominator=1000))
def test_round_trip_rotation(angle, seed):
    d = parse_definition(f"[system]\nkind = rotation\nangle = {angle}\nseed = {seed}\n")
    assert parse_definition(serialize_definition(d)) == d
    system, x = d.build()
    assert system.angle == angle and x == seed % 1


def test_kinds_build():
    _, x = parse_definition("[system]\nkind = sturmian\nangle = 2/5\n").build()
    assert isinstance(x, CodingPoint) and isinstance(x.system, SturmianSystem)
    system, x = parse_definition("[system]\nkind = fullshift\nseed = 01\n").build()
    assert isinstance(system, FullShift) and isinstance(x, PeriodicPoint)
    system, x = parse_definition(PRODUCT_TEXT).build()
    assert isinstance(system, ProductSystem)
    assert x == (Fraction(0), OdometerPoint((0, 1, 1, 0)))
    assert isinstance(parse_definition("[system]\nkind = rotation\nangle = 1/3\n").build()[0], RotationSystem)
    assert isinstance(parse_definition(TM_TEXT).build()[0], SubstitutionSystem)


@pytest.mark.parametrize("text,field", [
    ("[system]\nkind = substitution\nrule = 0->\n", "rule"),
    ("[system]\nkind = substitution\nrule = 0->00;1->11\n", "rule"),
    ("[system]\nkind = substitution\n", "rule"),
    ("[system]\nkind = rotation\nangle = x\n", "angle"),
    ("[system]\nkind = rotation\nangle = 3/2\n", "angle"),
    ("[system]\nkind = sturmian\nangle = 1/3\nconvention = up\n", "convention"),
    ("[system]\nkind = torus\n", "kind"),
    ("[system]\nangle = 1/3\n", "kind"),
    ("[system]\nkind = rotation\nangle = 1/3\ncolor = red\n", "color"),
    ("[system]\nkind = odometer\nseed = 012\n", "seed"),
    ("[system]\nkind = fullshift\nseed = 2\n", "seed"),
    ("[system]\nkind = product\ncomponents = a\n", "components"),
    ("[system]\nkind = product\ncomponents = a, b\n", "system.a"),
    ("no sections here", "file"),
])
def test_errors_name_the_field(text, field):
    with pytest.raises(DefinitionError) as info:
        parse_definition(text).build()
    assert info.value.field == field
