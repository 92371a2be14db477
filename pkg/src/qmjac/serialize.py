"""Conversion of results to JSON-ready values.

Rationals become "num/den" strings, complex floats [re, im] doubles, and
matrices row-major nested lists.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from fractions import Fraction

import numpy as np

from .algebra import GaussianRational, Poly, Quaternion, frac_str


def jsonable(obj):
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, GaussianRational):
        return [frac_str(obj.re), frac_str(obj.im)]
    if isinstance(obj, Quaternion):
        return [frac_str(v) for v in obj.coords()]
    if isinstance(obj, Poly):
        return {"coeffs": [jsonable(c) for c in obj.coeffs], "pretty": obj.pretty("T")}
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()] if obj.dtype != object else [jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    if dataclasses.is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=str) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2)


def _flatten(prefix: str, value, rows: list) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], rows)
    elif isinstance(value, list) and value and any(isinstance(v, (dict, list)) for v in value):
        for n, v in enumerate(value):
            _flatten(f"{prefix}[{n}]", v, rows)
    else:
        rows.append((prefix, json.dumps(value) if isinstance(value, list) else value))


def to_csv(obj) -> str:
    rows: list = []
    _flatten("", jsonable(obj), rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)
    return buf.getvalue()


def to_pretty(obj) -> str:
    rows: list = []
    _flatten("", jsonable(obj), rows)
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows) + "\n"
