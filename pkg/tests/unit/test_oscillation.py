"""
Unit tests for oscillation.py - skeleton extraction and the individual certificate checks
"""

import math

import numpy as np
import pytest

from core.bounds import eval_A_minus, eval_A_plus, eval_B, eval_x2
from core.exceptions import DomainError, ParameterDomainError
from core.oscillation import (
    analysis_stop,
    certify_profile,
    count_inflections,
    estimate_limits,
    extract_oscillation,
    iterate_F,
    riccati_residual,
    to_log_coordinates,
    trivial_certificate,
    verify_amplitude_bounds,
    verify_skeleton,
    verify_slope_bounds,
    verify_squeeze,
)
from models.certification import OscillationRecord
from models.params import ModelParams
from models.profiles import Grid1D, LogProfile, ProfileSolution

pytestmark = pytest.mark.unit

DECAY = 0.1
PEAK_OFFSET = math.atan(1.0 / DECAY)  # T_j - Q_j for exp(-a t) sin t


def damped_sine(t, amplitude):
    return amplitude * np.exp(-DECAY * t) * np.sin(t)


def damped_sine_profile(params: ModelParams, amplitude: float = 0.05) -> LogProfile:
    """x(t) = amplitude exp(-t/10) sin t on [2, 40], first lobe negative"""
    grid = Grid1D(2.0, 40.0, 1e-3)
    t = grid.nodes
    x = damped_sine(t, amplitude)
    y = amplitude * np.exp(-DECAY * t) * (np.cos(t) - DECAY * np.sin(t))
    g = np.exp(-damped_sine(t - params.h, amplitude)) - 1.0
    return LogProfile(grid=grid, x=x, y=y, g=g, params=params, phi=np.exp(-x))


@pytest.fixture
def sine_profile(params):
    return damped_sine_profile(params)


@pytest.fixture
def sine_record(sine_profile):
    return extract_oscillation(sine_profile)


class TestLogCoordinates:
    """Test the change of variables phi = exp(-x)"""

    def test_transform(self):
        params = ModelParams(2.0, 0.5)
        grid = Grid1D(-10.0, 10.0, 0.125)
        phi = 1.0 / (1.0 + np.exp(-grid.nodes))
        sol = ProfileSolution(grid=grid, phi=phi, dphi=np.gradient(phi, 0.125), params=params,
                              left_amplitude=float(phi[0]), decay_rate=1.0)
        lp = to_log_coordinates(sol)
        np.testing.assert_allclose(lp.x, -np.log(phi))
        np.testing.assert_allclose(lp.g[8:], phi[:-8] - 1.0)
        np.testing.assert_allclose(lp.y[1:-1], -(np.gradient(np.log(phi), 0.125))[1:-1])

    def test_needs_positive_profile(self, params):
        grid = Grid1D(0.0, 1.0, 0.5)
        sol = ProfileSolution(grid=grid, phi=np.array([0.1, 0.0, 1.0]), dphi=np.zeros(3), params=params)
        with pytest.raises(DomainError):
            to_log_coordinates(sol)

    def test_riccati_residual_of_consistent_data(self, params):
        lp = damped_sine_profile(params)
        dy = -0.05 * np.exp(-DECAY * lp.t) * ((1.0 - DECAY**2) * np.sin(lp.t) + 2.0 * DECAY * np.cos(lp.t))
        lp.g = lp.y**2 + params.c * lp.y - dy
        assert riccati_residual(lp) < 1e-6


class TestExtractOscillation:
    """Test zeros, extremum points and amplitudes on a damped sine"""

    def test_counts(self, sine_record):
        assert sine_record.count == 11
        assert len(sine_record.Q) == 12
        assert len(sine_record.P) == 10

    def test_zeros_and_extrema(self, sine_record):
        j = np.arange(sine_record.count)
        np.testing.assert_allclose(sine_record.Q[:-1], (j + 1) * math.pi, atol=1e-6)
        np.testing.assert_allclose(sine_record.T, (j + 1) * math.pi + PEAK_OFFSET, atol=1e-5)
        np.testing.assert_allclose(sine_record.V, damped_sine(sine_record.T, 0.05), rtol=1e-6)

    def test_first_lobe_negative(self, sine_record):
        assert sine_record.V[0] < 0
        assert np.all(np.sign(sine_record.V[1:]) == -np.sign(sine_record.V[:-1]))

    def test_inflections_between_extrema(self, sine_record):
        assert len(sine_record.inflections) == sine_record.count - 1

    def test_stop_abscissa(self, sine_profile):
        rec = extract_oscillation(sine_profile, t_stop=20.0)
        assert len(rec.Q) == 6
        assert rec.count == 5

    def test_noise_floor_ends_record(self, params):
        lp = damped_sine_profile(params, amplitude=1.0)
        rec = extract_oscillation(lp, noise_floor=0.1)
        assert rec.count == 6
        assert np.all(np.abs(rec.V) >= 0.1)

    def test_noise_floor_must_be_positive(self, sine_profile):
        with pytest.raises(DomainError):
            extract_oscillation(sine_profile, noise_floor=0.0)

    def test_monotone_profile_has_no_record(self, params):
        grid = Grid1D(0.0, 10.0, 0.01)
        x = np.exp(-grid.nodes)
        lp = LogProfile(grid=grid, x=x, y=-x, g=np.zeros_like(x), params=params, phi=np.exp(-x))
        assert extract_oscillation(lp).is_empty


class TestSkeleton:
    """Test alternation and the delay-relative spacing of zeros and extrema"""

    def test_damped_sine_passes(self, sine_profile, sine_record):
        report = verify_skeleton(sine_profile, sine_record)
        assert report.overall
        names = {check.name for check in report.checks}
        assert {"alternation", "extremum_within_delay", "single_extremum", "slow_oscillation", "isocline_zero"} <= names

    def test_short_delay_fails(self):
        params = ModelParams(2.0, 0.5)
        lp = damped_sine_profile(params)
        report = verify_skeleton(lp, extract_oscillation(lp))
        assert "extremum_within_delay" in {check.name for check in report.failures}

    def test_long_delay_fails(self):
        params = ModelParams(2.0, 2.5)
        lp = damped_sine_profile(params)
        report = verify_skeleton(lp, extract_oscillation(lp))
        assert "slow_oscillation" in {check.name for check in report.failures}

    def test_empty_record(self, sine_profile):
        report = verify_skeleton(sine_profile, OscillationRecord())
        assert report.checks == []
        assert report.overall

    def test_single_inflection(self, sine_record):
        report = count_inflections(sine_record)
        assert report.overall
        assert len(report.checks) == sine_record.count - 1


class TestSlopeBounds:
    """Test the isocline bookkeeping of the slope checks"""

    def test_isocline_identity(self, sine_profile, sine_record):
        report = verify_slope_bounds(sine_profile, sine_record)
        by_name = {check.name: check for check in report.checks}
        assert by_name["isocline_identity"].passed
        assert by_name["above_lambda_1"].passed

    def test_vacuous_without_oscillation(self, sine_profile):
        report = verify_slope_bounds(sine_profile, OscillationRecord())
        assert report.checks == []
        assert report.notes


class TestAmplitudeBounds:
    """Test the amplitude recursions on hand-built records"""

    @staticmethod
    def chain(params, shrink_up=0.9, shrink_down=0.5):
        v0 = -0.2
        v1 = shrink_up * eval_A_minus(v0, params)
        lower = eval_B(v1, params)
        if v1 <= eval_x2(params):
            lower = max(lower, eval_A_plus(v1, params))
        v2 = shrink_down * lower
        v3 = shrink_up * eval_A_minus(v2, params)
        return OscillationRecord(V=np.array([v0, v1, v2, v3]))

    def test_admissible_chain(self, params):
        report = verify_amplitude_bounds(self.chain(params), params)
        assert report.overall
        names = {check.name for check in report.checks}
        assert {"V0_lower", "A_minus_domain", "B_recursion", "A_minus_recursion"} <= names

    def test_overshoot_detected(self, params):
        report = verify_amplitude_bounds(self.chain(params, shrink_up=1.1), params)
        assert "A_minus_recursion" in {check.name for check in report.failures}

    def test_empty_record(self, params):
        report = verify_amplitude_bounds(OscillationRecord(), params)
        assert report.overall
        assert report.notes

    def test_requires_bounding_range(self):
        with pytest.raises(ParameterDomainError):
            verify_amplitude_bounds(OscillationRecord(), ModelParams(2.0, 0.8))


class TestTailLimits:
    """Test lim inf / lim sup estimates and the squeeze"""

    def test_final_quarter(self, sine_record):
        limits = estimate_limits(sine_record)
        window = sine_record.V[-3:]
        assert limits.m_star == window.min()
        assert limits.M_star == window.max()
        assert not limits.low_confidence

    def test_low_confidence(self):
        rec = OscillationRecord(V=np.array([-0.2, 0.1, -0.05]))
        limits = estimate_limits(rec)
        assert limits == (-0.05, 0.1, True)

    def test_empty(self):
        assert estimate_limits(OscillationRecord()) == (0.0, 0.0, False)

    @pytest.mark.parametrize("tau", [1.2, 1.5])
    def test_squeeze_at_zero(self, tau):
        report = verify_squeeze(0.0, 0.0, ModelParams(2.0, tau))
        assert report.overall
        assert len(report.checks) == (4 if tau < 1.5 else 2)

    def test_squeeze_rejects_wide_limits(self, params):
        report = verify_squeeze(-0.5, 0.9, params)
        assert not report.overall


class TestFIteration:
    """Test the orbit of F at tau = 3/2"""

    def test_strictly_decreasing(self, params):
        """F'(0) = 1 makes the decay algebraic, see DESIGN.md (F-iteration certificate)"""
        orbit = iterate_F(1.0, params, 50)
        assert len(orbit) == 51
        assert np.all(orbit > 0)
        assert np.all(np.diff(orbit) < 0)

    def test_zero_start(self, params):
        np.testing.assert_array_equal(iterate_F(0.0, params, 5), np.zeros(6))

    def test_negative_start(self, params):
        with pytest.raises(DomainError):
            iterate_F(-0.1, params)


class TestPipelineHelpers:
    """Test the trivial certificate and the analysed window"""

    def test_trivial_certificate(self):
        report = trivial_certificate(ModelParams(2.0, 0.8))
        assert report.trivial
        assert report.overall
        assert report.m_star == report.M_star == 0.0
        assert "trivially certified" in report.notes[0]

    def test_short_delay_skips_analysis(self):
        grid = Grid1D(0.0, 1.0, 0.5)
        sol = ProfileSolution(grid=grid, phi=np.ones(3), dphi=np.zeros(3), params=ModelParams(2.0, 1.0))
        report = certify_profile(sol)
        assert report.trivial
        assert report.checks == []

    def test_analysis_stop(self, params):
        grid = Grid1D(-60.0, 420.0, 3.0 / 64)
        sol = ProfileSolution(grid=grid, phi=np.ones(grid.n), dphi=np.zeros(grid.n), params=params)
        assert analysis_stop(sol) == pytest.approx(414.0)
