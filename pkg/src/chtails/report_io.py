"""Writers for run outputs: series.csv, report.json, verdicts.csv, profiles."""

from __future__ import annotations

import csv
import json
import math
import platform
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .scenarios import SERIES_COLUMNS, ExperimentReport

__all__ = ["environment_stamp", "report_document", "write_series", "format_value"]


def format_value(v) -> str:
    """Shortest decimal that round-trips the float; nan/inf spelled out."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


def environment_stamp() -> dict:
    return {
        "chtails": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def report_document(report: ExperimentReport) -> dict:
    return _jsonable({
        "name": report.name,
        "status": report.status,
        "partial": report.partial,
        "passed": report.passed,
        "error": report.error,
        "config": report.config,
        "verdicts": [
            {"criterion": v.criterion, "name": v.name, "measured": v.measured,
             "tolerance": v.tolerance, "passed": v.passed, "note": v.note}
            for v in report.verdicts
        ],
        "extra": report.extra,
        "series": report.series,
        "environment": environment_stamp(),
    })


def write_series(report: ExperimentReport, directory, profiles: bool = False) -> list[Path]:
    """Write the run outputs into ``directory`` and return the paths written.

    ``series.csv`` is only produced for time-dependent experiments.
    """
    out = Path(directory)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc
    written = []
    if "t" in report.series and all(c in report.series for c in SERIES_COLUMNS):
        path = out / "series.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SERIES_COLUMNS)
            for row in zip(*(report.series[c] for c in SERIES_COLUMNS)):
                w.writerow([format_value(v) for v in row])
            if report.partial:
                fh.write(f"# partial run: {report.error}; last row is the last good state\n")
        written.append(path)

    path = out / "report.json"
    path.write_text(json.dumps(report_document(report), indent=2, allow_nan=False) + "\n",
                    encoding="utf-8")
    written.append(path)

    path = out / "verdicts.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["criterion", "name", "measured", "tolerance", "passed"])
        for v in report.verdicts:
            w.writerow([v.criterion, v.name, format_value(v.measured),
                        format_value(v.tolerance), "pass" if v.passed else "FAIL"])
    written.append(path)

    if profiles:
        for k, (t, x, u, h) in enumerate(report.profiles):
            path = out / f"profile_t{k}.csv"
            with open(path, "w", newline="", encoding="utf-8") as fh:
                fh.write(f"# t={format_value(t)}\n")
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["x", "u", "h"])
                for row in zip(x, u, h):
                    w.writerow([format_value(v) for v in row])
            written.append(path)
    return written
