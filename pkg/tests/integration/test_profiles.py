"""
Integration tests - full-resolution profile solves, PDE fronts and the certificate
"""

from dataclasses import replace

import numpy as np
import pytest

from core.bvp_solver import bvp_residual, eps_form_residual, solve_profile_bvp
from core.oscillation import (
    analysis_stop,
    certify_profile,
    extract_oscillation,
    iterate_F,
    to_log_coordinates,
    verify_slope_bounds,
)
from core.pde_simulator import (
    extract_comoving_profile,
    half_level_crossing,
    measure_front_speed,
    profile_distance,
    simulate_pde_front,
)
from models.params import ModelParams
from models.profiles import BvpGridConfig

pytestmark = [pytest.mark.integration, pytest.mark.slow]


@pytest.fixture(scope="module")
def critical_front():
    """PDE run from step data at tau = 3/2 on the default domain"""
    return simulate_pde_front(ModelParams(2.0, 1.5))


@pytest.fixture(scope="module")
def fronts():
    """PDE runs at c = 2 for the delays compared against the boundary-value profile"""
    return {tau: simulate_pde_front(ModelParams(2.0, tau)) for tau in (0.0, 1.0, 1.4)}


def first_overshoot(t: np.ndarray, phi: np.ndarray) -> float:
    """Height above 1 of the first local maximum behind the 1/2 crossing"""
    start = int(np.searchsorted(t, half_level_crossing(t, phi)))
    tail = phi[start:]
    peaks = np.nonzero((tail[1:-1] >= tail[:-2]) & (tail[1:-1] > tail[2:]) & (tail[1:-1] > 1.0))[0]
    assert peaks.size, "profile never rises above 1"
    return float(tail[peaks[0] + 1] - 1.0)


class TestProfileSolver:
    """Test convergence across the delay range at the critical speed"""

    @pytest.mark.parametrize("tau", [0.0, 1.0, 1.4, 1.5])
    def test_converges(self, tau):
        sol = solve_profile_bvp(ModelParams(2.0, tau))
        assert sol.converged, sol.message
        assert sol.residual_inf < 1e-10
        assert sol.is_positive
        assert sol.phi[-1] == pytest.approx(1.0, abs=1e-4)

    def test_critical_profile_diagnostics(self, critical_profile):
        assert critical_profile.converged
        assert bvp_residual(critical_profile) < 1e-9
        assert eps_form_residual(critical_profile) < 1e-8

    def test_critical_profile_overshoots(self, critical_profile):
        """The delayed profile oscillates around 1 behind the front"""
        assert critical_profile.phi.max() > 1.0


class TestCertificate:
    """Test the complete oscillation certificate"""

    def test_critical_pair_certified(self, critical_profile):
        report = certify_profile(critical_profile)
        assert report.overall, [(c.name, c.interval, c.margin) for c in report.failures]
        assert not report.trivial
        assert report.record.count >= 4

    def test_tail_limits_vanish(self, critical_profile):
        report = certify_profile(critical_profile)
        assert abs(report.m_star) < 1e-3
        assert abs(report.M_star) < 1e-3

    def test_amplitudes_alternate_and_shrink(self, critical_profile):
        rec = certify_profile(critical_profile).record
        assert rec.V[0] < 0
        assert np.all(np.sign(rec.V[1:]) == -np.sign(rec.V[:-1]))
        assert abs(rec.V[-1]) < abs(rec.V[0])

    def test_F_orbit_from_second_amplitude(self, critical_profile, params):
        """Monotone decrease only, see DESIGN.md (F-iteration certificate)"""
        rec = certify_profile(critical_profile).record
        orbit = iterate_F(float(rec.V[1]), params, 50)
        assert np.all(np.diff(orbit) < 0)

    def test_dent_after_critical_point_breaks_slope_bound(self, critical_profile):
        """Lowering y three nodes past p_j pushes it under the isocline"""
        lp = to_log_coordinates(critical_profile)
        rec = extract_oscillation(lp, t_stop=analysis_stop(critical_profile))
        assert verify_slope_bounds(lp, rec).overall

        j = next(k for k in range(rec.count - 1) if rec.V[k] > 0)
        y = lp.y.copy()
        y[int(np.searchsorted(lp.t, rec.P[j])) + 3] -= 0.05
        report = verify_slope_bounds(replace(lp, y=y), rec)
        failed = [(check.name, check.interval) for check in report.failures]
        assert failed == [("slope_p_after", f"T_{j}..T_{j + 1}")]
        assert report.failures[0].margin < -0.04


class TestPdeFront:
    """Test the method-of-lines front against the boundary-value profile"""

    @pytest.mark.parametrize("tau", [0.0, 1.5])
    def test_front_speed(self, tau, critical_front, fronts):
        trajectory = critical_front if tau == 1.5 else fronts[tau]
        speed = measure_front_speed(trajectory.times, trajectory.fronts)
        assert speed == pytest.approx(2.0, rel=0.02)

    def test_comoving_profile_matches_boundary_value_profile(self, critical_front, critical_profile):
        comoving = extract_comoving_profile(critical_front, critical_front.times[-1])
        assert profile_distance(critical_profile, comoving) < 1e-2

    @pytest.mark.parametrize("tau", [0.0, 1.0, 1.4])
    def test_agreement_below_critical_delay(self, tau, fronts):
        trajectory = fronts[tau]
        comoving = extract_comoving_profile(trajectory, trajectory.times[-1])
        sol = solve_profile_bvp(ModelParams(2.0, tau))
        assert profile_distance(sol, comoving) < 1e-2

    def test_first_overshoot_matches(self, fronts):
        """tau = 1.4: height of the first maximum above 1 agrees within 5%"""
        trajectory = fronts[1.4]
        comoving = extract_comoving_profile(trajectory, trajectory.times[-1])
        sol = solve_profile_bvp(ModelParams(2.0, 1.4))
        expected = first_overshoot(sol.grid.nodes, sol.phi)
        assert first_overshoot(comoving.grid.nodes, comoving.phi) == pytest.approx(expected, rel=0.05)


class TestProfileShape:
    """Test qualitative shape and discretization order of the profile"""

    @pytest.mark.parametrize("c,tau", [(2.0, 0.0), (2.0, 0.25), (2.5, 0.25)])
    def test_eventually_monotone(self, c, tau):
        """Linearization at 1 has a negative real root, so dphi keeps its sign behind the front"""
        sol = solve_profile_bvp(ModelParams(c, tau))
        t = sol.grid.nodes
        behind = t >= half_level_crossing(t, sol.phi)
        assert np.all(sol.dphi[behind] >= -1e-8)
        assert sol.phi.max() <= 1.0 + 1e-8

    def test_unit_delay_already_oscillates(self):
        """c = 2, tau = 1: no negative real root at 1, see DESIGN.md (eventual monotonicity)"""
        sol = solve_profile_bvp(ModelParams(2.0, 1.0))
        assert sol.converged, sol.message
        assert sol.phi.max() > 1.0 + 1e-6

    @pytest.mark.parametrize("c,tau", [(2.0, 1.1), (2.5, 1.25), (3.0, 1.4), (5.0, 1.5)])
    def test_oscillating_front_converges_to_one(self, c, tau):
        sol = solve_profile_bvp(ModelParams(c, tau))
        assert sol.converged, sol.message
        report = certify_profile(sol)
        assert abs(report.m_star) < 1e-3
        assert abs(report.M_star) < 1e-3

    def test_second_order_in_the_step(self):
        """Halving the step divides the nodal error by about four"""
        params = ModelParams(2.5, 0.4)  # h = 1
        steps = [1.0 / 8, 1.0 / 16, 1.0 / 64]
        solutions = [
            solve_profile_bvp(params, BvpGridConfig(left_length=30.0, right_length=40.0, step=k)) for k in steps
        ]
        for sol in solutions:
            assert sol.converged, sol.message
        reference = solutions[-1].phi
        coarse = np.max(np.abs(solutions[0].phi - reference[::8]))
        fine = np.max(np.abs(solutions[1].phi - reference[::4]))
        assert 3.0 < coarse / fine < 5.5


class TestCertificationGrid:
    """Test the oscillation certificate across speeds and bounded delays"""

    @pytest.mark.parametrize("c", [2.0, 2.5, 3.0, 5.0])
    @pytest.mark.parametrize("tau", [1.1, 1.25, 1.4, 1.5])
    def test_certified(self, c, tau):
        sol = solve_profile_bvp(ModelParams(c, tau))
        assert sol.converged, sol.message
        report = certify_profile(sol)
        assert report.overall, [(check.name, check.interval, check.margin) for check in report.failures]
