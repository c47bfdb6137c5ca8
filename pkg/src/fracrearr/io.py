"""JSON and CSV outputs.

Floats are written with 17 significant digits so every value round-trips
exactly.  Non-finite floats (``alpha`` is ``-inf`` when every cell is
selected) are written as ``null``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0"
SCHEMA_PATH = Path(__file__).with_name("schemas") / "result.schema.json"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [_encode(v, indent, level + 1) for v in obj]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def load_schema() -> dict:
    return json.loads(SCHEMA_PATH.read_text())


def write_columns(path, header, columns) -> None:
    """CSV with one column per array, floats at full precision."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_field(path, x, values, name: str) -> None:
    write_columns(path, ["x", name], [np.asarray(x, float), np.asarray(values, float)])


def write_trace(path, trace) -> None:
    write_columns(path, ["iter", "energy"], [range(1, len(trace) + 1), [float(e) for e in trace]])


def write_table(path, rows, columns) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            out = []
            for c in columns:
                v = r.get(c)
                if isinstance(v, (float, np.floating)):
                    v = fmt(v)
                out.append("" if v is None else v)
            w.writerow(out)


class FieldFormatError(ValueError):
    pass


def read_field(path, n: int) -> np.ndarray:
    """Per-cell values from a CSV: one value per row, or ``x,value`` rows.

    A non-numeric first row is treated as a header.
    """
    vals = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row if c.strip()]
            if not cells:
                continue
            try:
                nums = [float(c) for c in cells]
            except ValueError:
                if lineno == 1 and not vals:
                    continue
                raise FieldFormatError(f"{path}: line {lineno}: non-numeric entry {row!r}") from None
            if len(nums) > 2:
                raise FieldFormatError(f"{path}: line {lineno}: expected 1 or 2 columns, got {len(nums)}")
            vals.append(nums[-1])
    if len(vals) != n:
        raise FieldFormatError(f"{path}: expected {n} values, got {len(vals)}")
    return np.asarray(vals)
