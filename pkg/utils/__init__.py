"""
Utilities for KPP Front Lab
"""

from .formatters import CsvFormatter, ReportFormatter, TableFormatter, format_duration
from .helpers import AsyncHelpers, FiniteDifference, ValidationHelpers

__all__ = [
    "CsvFormatter",
    "ReportFormatter",
    "TableFormatter",
    "format_duration",
    "AsyncHelpers",
    "FiniteDifference",
    "ValidationHelpers",
]
