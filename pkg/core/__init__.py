"""
Core modules for KPP Front Lab
"""

from .config import LabConfig, get_config
from .exceptions import LabError

__all__ = [
    "LabConfig",
    "get_config",
    "LabError",
]
