"""
Unit tests for helpers.py - Validation, finite differences and bounded concurrency
"""

import math
import threading

import pytest

from utils.helpers import AsyncHelpers, FiniteDifference, ValidationHelpers

pytestmark = pytest.mark.unit


class TestValidationHelpers:
    """Test validation helper functions"""

    def test_is_finite_number(self):
        """Test finite values, including numeric strings"""
        assert ValidationHelpers.is_finite_number(1.5) is True
        assert ValidationHelpers.is_finite_number("2") is True

    def test_is_finite_number_rejects(self):
        """Test NaN, infinity and non-numbers"""
        assert ValidationHelpers.is_finite_number(math.nan) is False
        assert ValidationHelpers.is_finite_number(math.inf) is False
        assert ValidationHelpers.is_finite_number("abc") is False
        assert ValidationHelpers.is_finite_number(None) is False

    def test_validate_output_dir_creates(self, temp_dir):
        """Test that a missing directory is created"""
        target = temp_dir / "a" / "b"
        assert ValidationHelpers.validate_output_dir(target) == (True, "OK")
        assert target.is_dir()

    def test_validate_output_dir_on_file(self, temp_dir):
        """Test that a regular file is not a directory"""
        blocker = temp_dir / "blocker"
        blocker.write_text("x")
        valid, message = ValidationHelpers.validate_output_dir(blocker / "sub")
        assert valid is False
        assert "Invalid output directory" in message


class TestFiniteDifference:
    """Test the Richardson-extrapolated jet"""

    def test_step_scaling(self):
        assert FiniteDifference.step_for(0.5) == 1e-2
        assert FiniteDifference.step_for(-20.0) == pytest.approx(0.2)

    def test_exponential_jet(self):
        d1, d2, d3 = FiniteDifference.jet(math.exp, 0.3)
        expected = math.exp(0.3)
        assert d1 == pytest.approx(expected, rel=1e-10)
        assert d2 == pytest.approx(expected, rel=1e-8)
        assert d3 == pytest.approx(expected, rel=1e-5)

    def test_cubic_is_exact(self):
        d1, d2, d3 = FiniteDifference.jet(lambda x: x**3 - 2 * x, 2.0)
        assert d1 == pytest.approx(10.0, rel=1e-10)
        assert d2 == pytest.approx(12.0, rel=1e-8)
        assert d3 == pytest.approx(6.0, rel=1e-6)


class TestAsyncHelpers:
    """Test bounded concurrent execution"""

    @pytest.mark.asyncio
    async def test_gather_keeps_order(self):
        """Test results come back in submission order"""
        jobs = [lambda i=i: i * i for i in range(6)]
        assert await AsyncHelpers.gather_with_limit(jobs, limit=3) == [0, 1, 4, 9, 16, 25]

    @pytest.mark.asyncio
    async def test_gather_respects_limit(self):
        """Test at most `limit` jobs run at once"""
        lock = threading.Lock()
        state = {"running": 0, "peak": 0}

        def job():
            with lock:
                state["running"] += 1
                state["peak"] = max(state["peak"], state["running"])
            threading.Event().wait(0.02)
            with lock:
                state["running"] -= 1

        await AsyncHelpers.gather_with_limit([job] * 8, limit=2)
        assert state["peak"] <= 2

    @pytest.mark.asyncio
    async def test_gather_return_exceptions(self):
        """Test failures are returned in place when requested"""

        def boom():
            raise ValueError("boom")

        results = await AsyncHelpers.gather_with_limit([lambda: 1, boom], return_exceptions=True)
        assert results[0] == 1
        assert isinstance(results[1], ValueError)

    @pytest.mark.asyncio
    async def test_gather_raises_first_error(self):
        def boom():
            raise ValueError("boom")

        with pytest.raises(ValueError):
            await AsyncHelpers.gather_with_limit([boom])
