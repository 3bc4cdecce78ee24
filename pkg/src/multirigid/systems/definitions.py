"""Plain-text system definitions (INI-style key/value, via configparser).

Example::

    [system]
    kind = substitution
    rule = 0->01;1->10
    seed = 1.0

A product lists component section names; each lives in ``[system.<name>]``.
Serialization is canonical, so parse -> serialize -> parse is the identity.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DefinitionError, RuleParseError, UnsupportedRuleError
from .odometer import OdometerSystem, parse_digits
from .product import ProductSystem
from .rotation import RotationSystem
from .symbolic import (CodingPoint, FixedPoint, FullShift, PeriodicPoint, SturmianSystem,
                       SubstitutionSystem, format_rule, parse_rule)

FIELDS = {
    "substitution": ("rule", "seed"),
    "sturmian": ("angle", "seed", "convention"),
    "rotation": ("angle", "seed"),
    "odometer": ("seed",),
    "fullshift": ("alphabet", "seed"),
    "product": ("components",),
}
DEFAULTS = {
    "substitution": {"seed": "1.0"},
    "sturmian": {"seed": "0", "convention": "left"},
    "rotation": {"seed": "0"},
    "odometer": {"seed": "0"},
    "fullshift": {"alphabet": "01", "seed": "0"},
}


@dataclass(frozen=True)
class SystemDefinition:
    kind: str
    fields: tuple[tuple[str, str], ...]
    components: tuple[tuple[str, "SystemDefinition"], ...] = field(default=())

    def get(self, key: str) -> str:
        return dict(self.fields)[key]

    def build(self):
        """Return ``(system, seed_point)``."""
        try:
            return _build(self)
        except (RuleParseError, UnsupportedRuleError) as exc:
            key = "rule" if self.kind == "substitution" else "angle"
            raise DefinitionError(key, str(exc)) from exc


def _fraction(key: str, text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DefinitionError(key, f"not a rational number: {text!r}") from exc


def _normalize(kind: str, raw: dict[str, str]) -> tuple[tuple[str, str], ...]:
    if kind not in FIELDS:
        raise DefinitionError("kind", f"unknown kind {kind!r}; expected one of {sorted(FIELDS)}")
    merged = dict(DEFAULTS.get(kind, {}))
    merged.update({k: v.strip() for k, v in raw.items() if k != "kind"})
    unknown = set(merged) - set(FIELDS[kind])
    if unknown:
        raise DefinitionError(sorted(unknown)[0], f"not a field of kind {kind!r}")
    for key in FIELDS[kind]:
        if key not in merged or merged[key] == "":
            raise DefinitionError(key, "missing")
    if kind == "substitution":
        try:
            merged["rule"] = format_rule(parse_rule(merged["rule"]))
        except RuleParseError as exc:
            raise DefinitionError("rule", str(exc)) from exc
    if kind in ("sturmian", "rotation"):
        merged["angle"] = str(_fraction("angle", merged["angle"]))
        merged["seed"] = str(_fraction("seed", merged["seed"]))
    if kind == "sturmian" and merged["convention"] not in ("left", "right"):
        raise DefinitionError("convention", "must be 'left' or 'right'")
    if kind == "odometer" and set(merged["seed"]) - {"0", "1"}:
        raise DefinitionError("seed", "odometer seed must be a 0/1 digit string")
    return tuple((k, merged[k]) for k in FIELDS[kind])


def _from_section(cp: configparser.ConfigParser, name: str, depth: int = 0) -> SystemDefinition:
    if depth > 4:
        raise DefinitionError("components", "nesting too deep")
    if not cp.has_section(name):
        raise DefinitionError(name, "section missing")
    raw = dict(cp.items(name))
    kind = raw.get("kind", "").strip()
    if not kind:
        raise DefinitionError("kind", f"missing in [{name}]")
    fields_ = _normalize(kind, raw)
    comps = ()
    if kind == "product":
        names = [c.strip() for c in dict(fields_)["components"].split(",") if c.strip()]
        if len(names) < 2:
            raise DefinitionError("components", "a product needs at least two components")
        comps = tuple((c, _from_section(cp, f"system.{c}", depth + 1)) for c in names)
        fields_ = (("components", ", ".join(names)),)
    return SystemDefinition(kind, fields_, comps)


def parse_definition(text: str, section: str = "system") -> SystemDefinition:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise DefinitionError("file", str(exc)) from exc
    return _from_section(cp, section)


def definition_from_parser(cp: configparser.ConfigParser, section: str = "system") -> SystemDefinition:
    return _from_section(cp, section)


def _sections(defn: SystemDefinition, name: str) -> list[tuple[str, list[tuple[str, str]]]]:
    out = [(name, [("kind", defn.kind)] + list(defn.fields))]
    for cname, cdef in defn.components:
        out.extend(_sections(cdef, f"system.{cname}"))
    return out


def serialize_definition(defn: SystemDefinition, section: str = "system") -> str:
    lines = []
    for name, items in _sections(defn, section):
        lines.append(f"[{name}]")
        lines.extend(f"{k} = {v}" for k, v in items)
        lines.append("")
    return "\n".join(lines)


def _build(defn: SystemDefinition):
    f = dict(defn.fields)
    kind = defn.kind
    if kind == "substitution":
        system = SubstitutionSystem(f["rule"])
        try:
            return system, FixedPoint(system, f["seed"])
        except (ValueError, UnsupportedRuleError) as exc:
            raise DefinitionError("seed", str(exc)) from exc
    if kind == "sturmian":
        system = SturmianSystem(Fraction(f["angle"]))
        return system, CodingPoint(system, Fraction(f["seed"]), f["convention"])
    if kind == "rotation":
        system = RotationSystem(Fraction(f["angle"]))
        return system, Fraction(f["seed"]) % 1
    if kind == "odometer":
        return OdometerSystem(), parse_digits(f["seed"])
    if kind == "fullshift":
        system = FullShift(f["alphabet"])
        if set(f["seed"]) - set(system.alphabet):
            raise DefinitionError("seed", "seed uses symbols outside the alphabet")
        return system, PeriodicPoint(system, f["seed"])
    if kind == "product":
        built = [c.build() for _, c in defn.components]
        return ProductSystem(s for s, _ in built), tuple(p for _, p in built)
    raise DefinitionError("kind", f"unknown kind {kind!r}")
