"""Wide-format CSV ingestion and deterministic CSV/JSON emission."""
from __future__ import annotations

import csv
import json
import math
from typing import IO, Iterable, Optional, Sequence

import numpy as np

from .errors import DataError
from .murphy import ForecastComparisonSet, FunctionalSpec

OUTCOME_COLUMN = "y"


def _parse(cell: str, row: int, col: str) -> float:
    try:
        value = float(cell.strip())
    except ValueError:
        raise DataError(f"row {row}, column {col!r}: not a number: {cell!r}") from None
    if not math.isfinite(value):
        raise DataError(f"row {row}, column {col!r}: non-finite value {cell!r}")
    return value


def read_table(path) -> tuple[list[str], np.ndarray]:
    """Header and numeric body of a comma-separated file.

    Rows are numbered from 1 after the header in error messages.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise DataError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise DataError("duplicate column names in header")
    body = rows[1:]
    if not body:
        raise DataError(f"{path} has a header but no data rows")
    values = np.empty((len(body), len(header)))
    for i, r in enumerate(body, start=1):
        if len(r) != len(header):
            raise DataError(f"row {i}: expected {len(header)} fields, found {len(r)}")
        for k, (cell, col) in enumerate(zip(r, header)):
            values[i - 1, k] = _parse(cell, i, col)
    return header, values


def load_csv(path, functional: FunctionalSpec, columns: Optional[Sequence[str]] = None) -> ForecastComparisonSet:
    """Read a wide CSV with an outcome column ``y``; other columns are forecasters.

    ``columns`` selects and orders forecaster columns; by default all are used.
    """
    header, values = read_table(path)
    if OUTCOME_COLUMN not in header:
        raise DataError(f"missing outcome column {OUTCOME_COLUMN!r}")
    available = [h for h in header if h != OUTCOME_COLUMN]
    if columns is None:
        columns = available
    for c in columns:
        if c not in available:
            raise DataError(f"no forecast column named {c!r}; available: {', '.join(available) or 'none'}")
    if not columns:
        raise DataError("no forecast columns")
    y = values[:, header.index(OUTCOME_COLUMN)]
    x = values[:, [header.index(c) for c in columns]]
    return ForecastComparisonSet(y, x, functional, tuple(columns))


def fmt(value) -> str:
    """Round-trippable text for a number: 17 significant digits, empty for None."""
    if value is None:
        return ""
    if isinstance(value, (str, bool)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(stream: IO[str], header: Sequence[str], rows: Iterable[Sequence]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        # JSON has no infinities; keep them as strings
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(v, np.integer):
        return int(v)
    return v


def write_json(stream: IO[str], meta: dict, header: Sequence[str], rows: Iterable[Sequence], **extra) -> None:
    doc = {"meta": {k: _jsonable(v) for k, v in meta.items()}}
    doc.update({k: _jsonable(v) if not isinstance(v, (dict, list)) else v for k, v in extra.items()})
    doc["rows"] = [{h: _jsonable(v) for h, v in zip(header, r)} for r in rows]
    json.dump(doc, stream, indent=1)
    stream.write("\n")
