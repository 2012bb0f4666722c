"""Trace CSV and metrics JSON writers."""

from __future__ import annotations

import csv
import io
import json
import math
import os

from ..engine.analysis import compute_metrics
from ..engine.trace import COLUMNS, Trace, record_row
from .configio import validate

FLOAT_FORMAT = "%.9g"


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, int)):
        return str(int(v))
    return FLOAT_FORMAT % v


def trace_csv(trace: Trace) -> str:
    """The trace as CSV text: a header row of ``COLUMNS``, then one row per record."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in trace.records:
        w.writerow([_cell(v) for v in record_row(r)])
    return buf.getvalue()


def table_csv(rows: list[dict]) -> str:
    """A list of flat dicts as CSV, columns in the first row's key order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rows:
        keys = list(rows[0])
        w.writerow(keys)
        for r in rows:
            w.writerow([_cell(r[k]) for k in keys])
    return buf.getvalue()


def export_trace(trace: Trace, path) -> str:
    """Write the trace CSV to ``path``; I/O errors propagate unchanged."""
    path = os.fspath(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(trace_csv(trace))
    return path


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def metrics_json(trace: Trace) -> str:
    m = _jsonable(compute_metrics(trace))
    validate(m, "metrics")
    return json.dumps(m, indent=2, sort_keys=True) + "\n"


def export_metrics(trace: Trace, path) -> str:
    path = os.fspath(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(metrics_json(trace))
    return path
