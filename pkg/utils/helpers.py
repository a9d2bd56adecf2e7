"""
General helper utilities for KPP Front Lab
"""

import asyncio
import math
import os
from pathlib import Path
from typing import Any, Callable, Sequence, Tuple, Union

from core.constants import FD_BASE_STEP


class ValidationHelpers:
    """Helper for validations"""

    @staticmethod
    def is_finite_number(value: Any) -> bool:
        """
        Check that a value converts to a finite float

        Args:
            value: Value to check

        Returns:
            True if finite
        """
        try:
            return math.isfinite(float(value))
        except (TypeError, ValueError):
            return False

    @staticmethod
    def validate_output_dir(path: Union[str, Path]) -> Tuple[bool, str]:
        """
        Validate that a directory exists (or can be created) and is writable

        Args:
            path: Directory path

        Returns:
            (valid, error_message)
        """
        try:
            directory = Path(path)
            directory.mkdir(parents=True, exist_ok=True)
            if not os.access(directory, os.W_OK):
                return False, f"Directory is not writable: {directory}"
            return True, "OK"
        except OSError as e:
            return False, f"Invalid output directory: {e}"


class FiniteDifference:
    """Central finite differences with one Richardson level"""

    @staticmethod
    def step_for(x: float, base: float = FD_BASE_STEP) -> float:
        """Step scaled by max(1, |x|)"""
        return base * max(1.0, abs(x))

    @staticmethod
    def _stencil(fn: Callable[[float], float], x: float, h: float) -> Tuple[float, float, float]:
        """Fourth-order first/second and second-order third differences at step h"""
        f0 = fn(x)
        fp1, fm1 = fn(x + h), fn(x - h)
        fp2, fm2 = fn(x + 2 * h), fn(x - 2 * h)
        d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h)
        d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
        d3 = (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h**3)
        return d1, d2, d3

    @staticmethod
    def jet(fn: Callable[[float], float], x: float, base: float = FD_BASE_STEP) -> Tuple[float, float, float]:
        """
        First three derivatives of fn at x

        Args:
            fn: Scalar function
            x: Abscissa
            base: Base step (scaled by max(1, |x|))

        Returns:
            (d1, d2, d3) after Richardson extrapolation on steps h and h/2
        """
        h = FiniteDifference.step_for(x, base)
        c1, c2, c3 = FiniteDifference._stencil(fn, x, h)
        f1, f2, f3 = FiniteDifference._stencil(fn, x, h / 2)
        d1 = (16 * f1 - c1) / 15
        d2 = (16 * f2 - c2) / 15
        d3 = (4 * f3 - c3) / 3
        return d1, d2, d3


class AsyncHelpers:
    """Helper for bounded concurrent execution"""

    @staticmethod
    async def gather_with_limit(jobs: Sequence[Callable[[], Any]], limit: int = 4, return_exceptions: bool = False) -> list:
        """
        Execute blocking jobs in worker threads with a concurrency limit

        Args:
            jobs: Zero-argument callables
            limit: Simultaneous execution limit
            return_exceptions: Return exceptions instead of raising the first one

        Returns:
            Results in submission order
        """
        semaphore = asyncio.Semaphore(max(1, limit))

        async def limited(job):
            async with semaphore:
                return await asyncio.to_thread(job)

        return await asyncio.gather(*[limited(job) for job in jobs], return_exceptions=return_exceptions)

