# src/services/report_service.py
"""
Writes experiment reports to disk.

Every file starts with `# {json parameter echo}`; numbers are printed with
17 significant digits so values round-trip exactly.
"""
import csv
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

import joblib
import numpy
import pydantic
import scipy

from src.event_bus import EventBus
from src.events import ReportWritten
from src.schemas.experiment import ExperimentReport, Table
from src.services.view_formatter import format_report_summary

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["experiment", "n", "rep", "statistic", "value"]


def library_versions() -> Dict[str, str]:
    return {
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "joblib": joblib.__version__,
        "pydantic": pydantic.VERSION,
    }


def format_number(value: float) -> str:
    return format(float(value), ".17g")


def parameter_line(parameters: Dict) -> str:
    return "# " + json.dumps(parameters, sort_keys=True)


class ReportService:
    """Turns an ExperimentReport into `<command>.csv`, one CSV per table and `<command>_summary.txt`."""

    def __init__(self, event_bus: Optional[EventBus] = None):
        self.event_bus = event_bus

    def _emit(self, path: Path, kind: str, rows: int, **extra) -> None:
        logger.info(f"Wrote {kind} {path} ({rows} rows)")
        if self.event_bus is not None:
            self.event_bus.emit("report_written", ReportWritten(path=str(path), kind=kind, rows=rows, extra=extra))

    def write_rows(self, report: ExperimentReport, path: Path) -> Path:
        with path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(parameter_line(report.parameters) + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(REPORT_COLUMNS)
            for row in report.rows:
                writer.writerow([row.experiment, row.n, row.rep, row.statistic, format_number(row.value)])
        self._emit(path, "csv", len(report.rows))
        return path

    def write_table(self, report: ExperimentReport, name: str, table: Table, path: Path) -> Path:
        with path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(parameter_line(report.parameters) + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow([format_number(v) for v in row])
        self._emit(path, "table", len(table.rows), table=name)
        return path

    def write_summary(self, report: ExperimentReport, path: Path) -> Path:
        text = parameter_line(report.parameters) + "\n" + format_report_summary(report, library_versions())
        path.write_text(text, encoding="utf-8")
        self._emit(path, "summary", len(report.checks))
        return path

    def write(self, report: ExperimentReport, output_dir: Path, command: str, emit_csv: bool = True,
              emit_summary: bool = True) -> List[Path]:
        output_dir.mkdir(parents=True, exist_ok=True)
        written: List[Path] = []
        if emit_csv:
            written.append(self.write_rows(report, output_dir / f"{command}.csv"))
            for name, table in report.tables.items():
                written.append(self.write_table(report, name, table, output_dir / f"{command}_{name}.csv"))
        if emit_summary:
            written.append(self.write_summary(report, output_dir / f"{command}_summary.txt"))
        return written
