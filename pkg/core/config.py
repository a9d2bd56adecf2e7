"""
Centralized configuration for KPP Front Lab
"""

import os
import logging
from pathlib import Path
from typing import Optional
from dataclasses import dataclass

from core.constants import LOG_FORMAT, LOG_LEVEL

# Load environment variables
try:
    from dotenv import load_dotenv

    env_path = Path(".env")
    if env_path.exists():
        load_dotenv()
except ImportError:
    pass


@dataclass
class WorkerConfig:
    """Worker pool configuration"""

    threads: int


@dataclass
class LoggingConfig:
    """Logging configuration"""

    level: str = LOG_LEVEL
    format: str = LOG_FORMAT


@dataclass
class OutputConfig:
    """Output configuration"""

    directory: Path


class LabConfig:
    """Process-wide KPP Front Lab configuration"""

    def __init__(self):
        self.workers = self._load_worker_config()
        self.logging = self._load_logging_config()
        self.output = self._load_output_config()
        self.logger = self._setup_logging()

        # Validation
        self._validate_config()

    def _load_worker_config(self) -> WorkerConfig:
        """Load worker configuration"""
        default_threads = os.cpu_count() or 1
        raw = os.getenv("KPP_FRONT_LAB_THREADS", "")
        try:
            threads = int(raw) if raw.strip() else default_threads
        except ValueError:
            threads = default_threads
        return WorkerConfig(threads=threads)

    def _load_logging_config(self) -> LoggingConfig:
        """Load logging configuration"""
        return LoggingConfig(level=os.getenv("KPP_FRONT_LAB_LOG_LEVEL", LOG_LEVEL).upper())

    def _load_output_config(self) -> OutputConfig:
        """Load output configuration"""
        return OutputConfig(directory=Path(os.getenv("KPP_FRONT_LAB_OUTPUT_DIR", "output")))

    def _setup_logging(self) -> logging.Logger:
        """Configure logging"""
        level = getattr(logging, self.logging.level, logging.INFO)
        logging.basicConfig(format=self.logging.format, level=level)
        return logging.getLogger("KPPFrontLab")

    def _validate_config(self):
        """Validate configuration"""
        if self.workers.threads < 1:
            self.logger.warning(f"KPP_FRONT_LAB_THREADS={self.workers.threads} is invalid, using 1")
            self.workers.threads = 1

    def log_config(self):
        """Log current configuration"""
        self.logger.info("=== KPP FRONT LAB CONFIGURATION ===")
        self.logger.info(f"Worker threads: {self.workers.threads}")
        self.logger.info(f"Log level: {self.logging.level}")
        self.logger.info(f"Default output directory: {self.output.directory}")


# Singleton for global configuration
_config: Optional[LabConfig] = None


def get_config() -> LabConfig:
    """Get configuration instance (singleton)"""
    global _config
    if _config is None:
        _config = LabConfig()
    return _config


def reset_config():
    """Drop the cached configuration so the environment is read again"""
    global _config
    _config = None
