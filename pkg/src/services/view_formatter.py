# services/view_formatter.py
"""
Text rendering of experiment reports for the terminal and the summary files.
"""
import json
from typing import Dict, Iterable, List, Optional, Sequence, Union

from src.schemas.experiment import ACROSS_SIZES, AGGREGATE, AcceptanceCheck, ExperimentReport

MAX_AGGREGATE_LINES = 24
CELL_DIGITS = 6


def format_as_box(title: str, content: Union[str, Sequence[str]]) -> str:
    """
    Frames `content` (text or a list of lines) with `title` centered in the
    top border. Every line of the result has the same width.
    """
    lines = content.split("\n") if isinstance(content, str) else [str(line) for line in content]
    lines = lines or [""]
    width = max([len(title)] + [len(line) for line in lines])

    left = (width - len(title)) // 2
    top = f"┌{'─' * left} {title} {'─' * (width - len(title) - left)}┐"
    body = [f"│ {line.ljust(width)} │" for line in lines]
    bottom = f"└{'─' * (width + 2)}┘"
    return "\n".join([top] + body + [bottom])


def format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if value is None:
        return ""
    return format(float(value), f".{CELL_DIGITS}g")


def format_table(columns: Sequence[str], rows: Iterable[Sequence]) -> List[str]:
    """Column-aligned lines: header, rule, body. The first column is left-aligned, the rest right-aligned."""
    cells = [[format_cell(v) for v in row] for row in rows]
    widths = [len(c) for c in columns]
    for row in cells:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]

    def line(row: Sequence[str]) -> str:
        first = row[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        return "  ".join([first] + rest).rstrip()

    return [line(list(columns)), "  ".join("─" * w for w in widths)] + [line(row) for row in cells]


def _size_label(n: int) -> str:
    return "all" if n == ACROSS_SIZES else str(n)


def format_aggregates(report: ExperimentReport, limit: Optional[int] = MAX_AGGREGATE_LINES) -> List[str]:
    """
    Aggregate rows (rep == AGGREGATE) pivoted into one line per statistic and
    one column per n; values across sizes go in the column 'all'.
    """
    values: Dict[str, Dict[int, float]] = {}
    sizes = set()
    for row in report.rows:
        if row.rep != AGGREGATE:
            continue
        values.setdefault(row.statistic, {})[row.n] = row.value
        sizes.add(row.n)
    if not values:
        return []
    sizes = sorted(sizes, key=lambda n: (n == ACROSS_SIZES, n))
    statistics = list(values)
    hidden = 0
    if limit is not None and len(statistics) > limit:
        hidden = len(statistics) - limit
        statistics = statistics[:limit]
    body = [[name] + [values[name].get(n) for n in sizes] for name in statistics]
    lines = format_table(["statistic"] + [_size_label(n) for n in sizes], body)
    if hidden:
        lines.append(f"... {hidden} more statistics in the CSV")
    return lines


def format_check(check: AcceptanceCheck) -> str:
    mark = "PASS" if check.passed else "FAIL"
    line = (f"[{mark}] {check.name}: observed {check.observed:.6g}, expected {check.expected:.6g}"
            f" (tol {check.tolerance:.3g})")
    if check.note:
        line += f" - {check.note}"
    return line


def format_checks(report: ExperimentReport) -> str:
    if not report.checks:
        return "(no acceptance checks)"
    return "\n".join(format_check(check) for check in report.checks)


def format_report_summary(report: ExperimentReport, versions: Dict[str, str]) -> str:
    """The human-readable companion of a report CSV: checks, aggregates, parameters, notes and versions."""
    params = json.dumps(report.parameters, indent=2, sort_keys=True)
    status = "PASSED" if report.passed else "FAILED"
    sections = [format_as_box(f"{report.experiment}: {status}", format_checks(report))]
    aggregates = format_aggregates(report, limit=None)
    if aggregates:
        sections.append(format_as_box("Aggregates", aggregates))
    sections += [
        format_as_box("Parameters", params),
        format_as_box("Versions", [f"{name:<10} {v}" for name, v in sorted(versions.items())]),
    ]
    if report.notes:
        sections.append(format_as_box("Notes", report.notes))
    sections.append(f"runtime: {report.runtime_seconds:.2f}s, rows: {len(report.rows)}")
    return "\n\n".join(sections) + "\n"


def format_command_help(commands: Iterable) -> str:
    """One line per registered blueprint."""
    lines = ["Commands:", ""]
    for bp in sorted(commands, key=lambda b: b.id):
        lines.append(f"{bp.id.ljust(14)} - {bp.description}")
        if bp.config_keys:
            lines.append(f"{'':14}   keys: {', '.join(bp.config_keys)}")
    return format_as_box("lrdlab help", lines)
