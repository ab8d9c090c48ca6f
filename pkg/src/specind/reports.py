"""Deterministic report serialization.

JSON output uses sorted keys and 17-significant-digit floats so that a report
is reproducible byte-for-byte given the same inputs, seed, and version.  The
volatile wall-clock time lives in a separate ``meta`` object next to the
``report`` payload.  Non-finite floats serialize as the strings "inf", "-inf"
and "nan" (plain JSON has no spelling for them); complex numbers as
``{"im": ..., "re": ...}``; fractions as exact "p/q" strings.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from fractions import Fraction
from typing import Mapping

import numpy as np

VERSION = "0.1.0"


def float_repr(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _key_str(key) -> str:
    return key if isinstance(key, str) else str(key)


def canonical_json(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return json.dumps(float_repr(x)) if not math.isfinite(x) else float_repr(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, complex):
        return canonical_json({"im": obj.imag, "re": obj.real})
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return canonical_json(
            {f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)}
        )
    if isinstance(obj, Mapping):
        items = sorted(((_key_str(k), v) for k, v in obj.items()), key=lambda kv: kv[0])
        body = ",".join(f"{json.dumps(k)}:{canonical_json(v)}" for k, v in items)
        return "{" + body + "}"
    if isinstance(obj, (list, tuple, set, frozenset, np.ndarray)):
        seq = sorted(obj, key=_key_str) if isinstance(obj, (set, frozenset)) else obj
        return "[" + ",".join(canonical_json(x) for x in seq) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def make_report(verb: str, inputs, results, formula_tags=(), caveats=()) -> dict:
    return {
        "verb": verb,
        "inputs": inputs,
        "results": results,
        "formula_tags": list(formula_tags),
        "caveats": list(caveats),
        "version": VERSION,
    }


def envelope_json(report: dict, wall_time_s: float) -> str:
    return canonical_json({"meta": {"wall_time_s": wall_time_s}, "report": report})


def csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return float_repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, complex):
        return f"{float_repr(value.real)}{'+' if value.imag >= 0 else ''}{float_repr(value.imag)}j"
    return str(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([csv_cell(x) for x in row])
    return buf.getvalue()


def flatten_results(results, prefix: str = "") -> dict[str, object]:
    """One-level-per-dot flattening of a results object into scalar columns;
    scalar sequences join with ';', other non-scalars are dropped."""
    out: dict[str, object] = {}

    def scalar(x) -> bool:
        return x is None or isinstance(
            x, (bool, int, float, str, complex, Fraction, np.integer, np.floating, np.bool_)
        )

    def visit(node, path):
        if dataclasses.is_dataclass(node) and not isinstance(node, type):
            node = {f.name: getattr(node, f.name) for f in dataclasses.fields(node)}
        if isinstance(node, Mapping):
            for k in sorted(node, key=_key_str):
                visit(node[k], f"{path}.{_key_str(k)}" if path else _key_str(k))
        elif isinstance(node, (list, tuple)):
            if all(scalar(x) for x in node):
                out[path] = ";".join(csv_cell(x) for x in node)
        elif scalar(node):
            out[path] = node

    visit(results, prefix)
    return out
