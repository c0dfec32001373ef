"""Schema-validated readers for the experiment CSV files.

Columns are located by header name, so column order does not matter; a
missing column or an empty body is an error, never a blank figure.  The
readers return rows verbatim: no statistics are computed here or anywhere
else in this package.
"""

from __future__ import annotations

import csv

TRACE_COLUMNS = ("generation", "evaluations", "om", "distortion", "total", "accepted")
MEDIAN_COLUMNS = (
    "n",
    "algorithm",
    "distribution",
    "runs",
    "median_generations",
    "mean_generations",
    "censored",
    "cutoff",
)
NORMALIZED_COLUMNS = ("p", "cutoff_d", "runs", "mean_generations", "normalized")


class FigureSchemaError(ValueError):
    """Input CSV does not match the expected schema."""


class FigureDataError(ValueError):
    """Input CSV is structurally valid but has no usable rows."""


def _read(path: str, required: tuple[str, ...]) -> list[dict]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames
        if header is None:
            raise FigureSchemaError(f"{path}: empty file, expected header {list(required)}")
        missing = [c for c in required if c not in header]
        if missing:
            raise FigureSchemaError(f"{path}: missing column(s) {missing}")
        rows = list(reader)
    if not rows:
        raise FigureDataError(f"{path}: no data rows")
    return rows


def read_trace(path: str) -> list[dict]:
    rows = _read(path, TRACE_COLUMNS)
    return [
        {
            "generation": int(r["generation"]),
            "evaluations": int(r["evaluations"]),
            "om": int(r["om"]),
            "distortion": float(r["distortion"]),
            "total": float(r["total"]),
            "accepted": r["accepted"].strip() in ("1", "true", "True"),
        }
        for r in rows
    ]


def read_median(path: str) -> list[dict]:
    rows = _read(path, MEDIAN_COLUMNS)
    return [
        {
            "n": int(r["n"]),
            "algorithm": r["algorithm"],
            "distribution": r["distribution"],
            "runs": int(r["runs"]),
            "median_generations": float(r["median_generations"]),
            "mean_generations": float(r["mean_generations"]),
            "censored": int(r["censored"]),
            "cutoff": float(r["cutoff"]),
        }
        for r in rows
    ]


def read_normalized(path: str) -> list[dict]:
    rows = _read(path, NORMALIZED_COLUMNS)
    return [
        {
            "p": float(r["p"]),
            "cutoff_d": float(r["cutoff_d"]),
            "runs": int(r["runs"]),
            "mean_generations": float(r["mean_generations"]),
            "normalized": float(r["normalized"]),
        }
        for r in rows
    ]
