"""Deterministic CSV / JSON report emission.

Rationals are written as "p/q"; CSV files add a ``<column>Decimal`` companion
for every rational column.  JSON uses sorted keys and no timestamps, so equal
inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__


class ReportError(OSError):
    pass


def render_fraction(v: Fraction) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def render_decimal(v: Fraction) -> str:
    return repr(float(Fraction(v)))


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return render_fraction(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def json_text(payload: dict) -> str:
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2) + "\n"


def csv_text(columns: Sequence[str], rows: Iterable[dict], rational: Sequence[str] = ()) -> str:
    """Rows as CSV; every column named in ``rational`` gains a decimal companion."""
    header = []
    for c in columns:
        header.append(c)
        if c in rational:
            header.append(c + "Decimal")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        out = []
        for c in columns:
            v = row.get(c, "")
            if c in rational:
                if v is None or v == "":
                    out += ["", ""]
                else:
                    out += [render_fraction(v), render_decimal(v)]
            elif isinstance(v, Fraction):
                out.append(render_fraction(v))
            elif v is None:
                out.append("")
            else:
                out.append(v)
        w.writerow(out)
    return buf.getvalue()


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise ReportError(f"cannot write report {path}: {exc}") from exc
    return path


def emit_report(out_dir: Path, name: str, fmt: str, payload=None, columns=(), rows=(), rational=()) -> Path:
    if fmt == "json":
        return write_text(Path(out_dir) / f"{name}.json", json_text(payload))
    if fmt == "csv":
        return write_text(Path(out_dir) / f"{name}.csv", csv_text(columns, rows, rational))
    raise ValueError(f"unknown report format {fmt!r}")


def metadata(config_text: str, config_hash: str, knobs: dict) -> dict:
    return {"version": __version__, "configSha256": config_hash, "config": config_text, "knobs": knobs}
