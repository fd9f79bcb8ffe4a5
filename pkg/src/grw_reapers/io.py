"""Byte-stable CSV and JSON serialization."""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

SCHEMA = "grw-reaper/1"
CURVE_HEADER = ("s", "y", "v", "causal_indicator")
CURVATURE_HEADER = ("t", "scalar", "mixed", "null_ricci_offset")


def fmt(x: float) -> str:
    # 17 significant digits always round-trip a double
    return "%.17g" % x


def to_csv(header, columns) -> str:
    cols = [np.asarray(c, dtype=float) for c in columns]
    if len(cols) != len(header):
        raise ValueError("header and column count differ")
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def read_csv(text: str) -> tuple[list[str], np.ndarray]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise ValueError("empty CSV")
    header = rows[0]
    data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, len(header))
    return header, data


def jsonable(obj):
    """Replace non-finite floats by strings and numpy scalars by Python ones."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def to_json(payload: dict) -> str:
    body = {"schema": SCHEMA}
    body.update(payload)
    return json.dumps(jsonable(body), sort_keys=True, indent=2, allow_nan=False) + "\n"


def curve_columns(curve) -> list[np.ndarray]:
    return [curve.s, curve.y, curve.v, curve.causal]


def curve_json(curve, meta: dict) -> dict:
    samples = np.column_stack(curve_columns(curve))
    terms = {}
    for side, term in (("left", curve.left_termination), ("right", curve.right_termination)):
        terms[side] = term.to_dict() if term is not None else None
    crit = [{"s": p.s, "y": p.y, "kind": p.kind} for p in curve.critical_points]
    return {
        "meta": meta,
        "columns": list(CURVE_HEADER),
        "samples": samples,
        "terminations": terms,
        "critical_points": crit,
    }
