"""CSV and JSON emission with stable, round-trip number formatting."""

from __future__ import annotations

import io
import json
import math

import numpy as np

SCI_ABOVE = 1e6
SCI_BELOW = 1e-4


def format_number(x) -> str:
    """Shortest round-trip text for ``x``; scientific outside ``[1e-4, 1e6)``."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x != 0 and (abs(x) >= SCI_ABOVE or abs(x) < SCI_BELOW):
        return np.format_float_scientific(x, unique=True, trim="-")
    return np.format_float_positional(x, unique=True, trim="0")


def _csv_cell(value) -> str:
    text = format_number(value)
    if any(c in text for c in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def to_csv(header, rows, comments=()) -> str:
    """Rows as comma-separated text; ``comments`` become trailing ``# `` lines."""
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_csv_cell(v) for v in row) + "\n")
    for line in comments:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no infinities; the report's reason field explains these
        return x if math.isfinite(x) else None
    return obj


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"
