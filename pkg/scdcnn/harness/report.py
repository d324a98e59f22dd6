"""
harness/report.py — CSV and JSON renderings of a Report.

CSV: one header row (grid keys, mean, std, trials, then extras in sorted
order), one row per cell in the report's order. JSON: {meta, grid, cells}.
Floats use 10 significant digits; wall time is left out so reruns with the
same seed are byte-identical.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

from scdcnn.core.models import CellValue, Report, ReportFormat

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _fmt(value: CellValue) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _plain(value: Any) -> Any:
    if isinstance(value, float):
        return float(format(value, ".10g"))
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def render_csv(report: Report) -> str:
    extras = sorted({key for cell in report.cells for key in cell.extras})
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([*report.grid_keys, "mean", "std", "trials", *extras])
    for cell in report.cells:
        writer.writerow(
            [_fmt(cell.params[k]) for k in report.grid_keys]
            + [_fmt(cell.mean), _fmt(cell.std), str(cell.trials)]
            + [_fmt(cell.extras[k]) if k in cell.extras else "" for k in extras]
        )
    return buffer.getvalue()


def render_json(report: Report) -> str:
    payload = {
        "meta": _plain(
            {
                "experiment": report.experiment,
                "seed": report.seed,
                "tool_version": report.tool_version,
                "grid_keys": report.grid_keys,
                **report.meta,
            }
        ),
        "grid": _plain(report.grid),
        "cells": [_plain(cell.model_dump()) for cell in report.cells],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def render_report(report: Report, fmt: ReportFormat = "csv") -> str:
    return render_json(report) if fmt == "json" else render_csv(report)


def emit_report(report: Report, fmt: ReportFormat = "csv", path: Optional[PathLike] = None) -> str:
    """Render the report and, when ``path`` is given, write it there as UTF-8."""
    text = render_report(report, fmt)
    if path is not None:
        target = Path(path)
        try:
            target.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write report {target}: {exc.strerror or exc}") from exc
        logger.info("[REPORT] %s: %d cells written to %s", report.experiment, len(report.cells), target)
    return text


__all__ = ["render_csv", "render_json", "render_report", "emit_report"]
