"""
CSV and text output formatting utilities
"""

import csv
import math
from pathlib import Path
from typing import Iterable, List, Sequence, Union

from core.constants import CSV_FLOAT_DIGITS
from models.certification import CertificationReport, OscillationRecord


class CsvFormatter:
    """Deterministic CSV emission"""

    @staticmethod
    def format_value(value) -> str:
        """
        Format one cell

        Args:
            value: Float, int, bool or string

        Returns:
            Floats with 17 significant digits, booleans as true/false
        """
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, int):
            return str(value)
        if isinstance(value, float):
            if math.isnan(value):
                return "nan"
            return format(value, f".{CSV_FLOAT_DIGITS}g")
        try:
            return format(float(value), f".{CSV_FLOAT_DIGITS}g")
        except (TypeError, ValueError):
            return str(value)

    @staticmethod
    def write(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        """
        Write a CSV file

        Args:
            path: Target file (single owner)
            header: Column names
            rows: Row values

        Returns:
            The written path
        """
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([CsvFormatter.format_value(value) for value in row])
        return path

    @staticmethod
    def certification_rows(report: CertificationReport, prefix: str = "") -> List[list]:
        """Rows of the check,interval,lhs,rhs,margin,pass schema"""
        return [
            [check.name, f"{prefix}{check.interval}", float(check.lhs), float(check.rhs), float(check.margin), check.passed]
            for check in report.checks
        ]

    @staticmethod
    def oscillation_rows(rec: OscillationRecord) -> List[list]:
        """Rows of the j,Q,T,V schema"""
        return [[j, float(rec.Q[j]), float(rec.T[j]), float(rec.V[j])] for j in range(rec.count)]


class TableFormatter:
    """Table formatter for text output"""

    @staticmethod
    def create_table(headers: List[str], rows: List[List[str]]) -> str:
        """
        Create formatted table

        Args:
            headers: Column headers
            rows: Data rows

        Returns:
            Formatted table
        """
        if not rows:
            return "No data available"

        col_widths = []
        for i, header in enumerate(headers):
            max_width = len(header)
            for row in rows:
                if i < len(row):
                    max_width = max(max_width, len(str(row[i])))
            col_widths.append(max_width)

        separator = "+" + "+".join(["-" * (w + 2) for w in col_widths]) + "+"

        def line(cells) -> str:
            out = "|"
            for i, cell in enumerate(cells):
                text = str(cell)
                out += f" {text.ljust(col_widths[i])} |"
            return out

        body = "\n".join(line(row) for row in rows)
        return f"{separator}\n{line(headers)}\n{separator}\n{body}\n{separator}"


class ReportFormatter:
    """Human-readable certification reports"""

    @staticmethod
    def format_margin(value: float) -> str:
        return f"{value:+.3e}"

    @staticmethod
    def format_report(report: CertificationReport, title: str) -> str:
        """
        Render a report as a titled table with a verdict line

        Args:
            report: Certification report
            title: First line, usually the parameter pair

        Returns:
            Multi-line text
        """
        lines = [title, "=" * len(title)]
        if report.trivial:
            lines.append("Verdict: PASS (trivially certified)")
        else:
            lines.append(f"Verdict: {'PASS' if report.overall else 'FAIL'}")
        if report.m_star is not None and report.M_star is not None:
            lines.append(f"m* = {report.m_star:.6e}   M* = {report.M_star:.6e}")
        lines.append("")

        if report.checks:
            rows = [
                [
                    check.name,
                    check.interval,
                    ReportFormatter.format_margin(check.margin),
                    "ok" if check.passed else "FAILED",
                ]
                for check in report.checks
            ]
            lines.append(TableFormatter.create_table(["check", "interval", "margin", "status"], rows))
        for note in report.notes:
            lines.append(f"- {note}")
        return "\n".join(lines) + "\n"


def format_duration(seconds: float) -> str:
    """
    Format elapsed time

    Args:
        seconds: Elapsed seconds

    Returns:
        Formatted time string
    """
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes, secs = divmod(int(seconds), 60)
    if minutes < 60:
        return f"{minutes}m {secs}s"
    hours, minutes = divmod(minutes, 60)
    return f"{hours}h {minutes}m"
