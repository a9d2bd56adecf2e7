"""
Unit tests for verification.py - bounding-function invariant suite
"""

import numpy as np
import pytest

from core.bounds import eval_D
from core.exceptions import ParameterDomainError
from core.verification import verify_bounds
from models.params import ModelParams

pytestmark = pytest.mark.unit

GRID = np.linspace(-2.0, 6.0, 17)


class TestVerifyBounds:
    """Test the invariant suite on a coarse abscissa grid"""

    def test_critical_pair_passes(self, params):
        report = verify_bounds(params, GRID)
        assert report.overall, [check.name for check in report.failures]

    def test_checks_at_largest_delay(self, params):
        """Monotonicity in tau is only checked below tau = 3/2"""
        names = [check.name for check in verify_bounds(params, GRID).checks]
        assert names == [
            "rho_decreasing",
            "rho_convex",
            "rho_schwarzian",
            "rho_above_r",
            "A_minus_decreasing",
            "A_minus_schwarzian",
            "D_decreasing",
            "D_continuous_at_0",
            "D_continuous_at_x2",
            "D_above_R",
            "F_below_identity",
            "F_positive",
            "F_increasing",
        ]

    def test_smaller_delay_adds_comparisons(self):
        report = verify_bounds(ModelParams(2.0, 1.25), GRID)
        names = {check.name for check in report.checks}
        assert {"A_minus_below_fixed_delay", "A_plus_above_fixed_delay", "B_above_fixed_delay"} <= names
        assert report.overall

    def test_faster_wave(self):
        assert verify_bounds(ModelParams(3.0, 1.4), GRID).overall

    def test_prefix_labels_intervals(self, params):
        report = verify_bounds(params, GRID, prefix="c=2 tau=1.5")
        assert all(check.interval.startswith("c=2 tau=1.5 ") for check in report.checks)

    def test_unsorted_input(self, params):
        shuffled = np.random.default_rng(3).permutation(GRID)
        first = verify_bounds(params, GRID)
        second = verify_bounds(params, shuffled)
        assert [c.margin for c in first.checks] == [c.margin for c in second.checks]

    def test_requires_bounding_range(self):
        with pytest.raises(ParameterDomainError):
            verify_bounds(ModelParams(2.0, 0.9), GRID)

    def test_broken_minorant_is_reported(self, params, mocker):
        """A minorant above rho fails exactly the rho > r check"""
        mocker.patch("core.verification.eval_r", return_value=1e3)
        report = verify_bounds(params, GRID)
        assert [check.name for check in report.failures] == ["rho_above_r"]
        assert report.failures[0].margin < 0

    def test_worst_point_is_named(self, params):
        report = verify_bounds(params, GRID)
        check = next(c for c in report.checks if c.name == "rho_above_r")
        assert "worst at x=" in check.interval

    def test_A_minus_schwarzian_skips_origin(self, params):
        report = verify_bounds(params, GRID)
        check = next(c for c in report.checks if c.name == "A_minus_schwarzian")
        assert check.passed
        assert check.margin > 0
        assert "x in [-2, " in check.interval

    def test_A_minus_schwarzian_sign_flip_is_reported(self, params, mocker):
        mocker.patch("core.verification.schwarzian", return_value=1.0)
        report = verify_bounds(params, GRID)
        failed = {check.name for check in report.failures}
        assert "A_minus_schwarzian" in failed
        assert "rho_schwarzian" in failed

    def test_D_continuous_at_origin(self, params):
        report = verify_bounds(params, GRID)
        check = next(c for c in report.checks if c.name == "D_continuous_at_0")
        assert check.passed
        assert check.lhs < 1e-10

    def test_D_jump_at_origin_is_reported(self, params, mocker):
        """A step in D across 0 fails the continuity check there"""
        real = eval_D
        mocker.patch(
            "core.verification.eval_D", side_effect=lambda x, p, cfg=None: real(x, p) + (1e-3 if x > 0 else 0.0)
        )
        report = verify_bounds(params, GRID)
        assert "D_continuous_at_0" in {check.name for check in report.failures}
