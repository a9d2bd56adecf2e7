"""
Integration tests for main.py and runner.py - commands, artifacts and exit codes
"""

import csv

import pytest

from core.runner import BOUNDARY_HEADER, BOUNDS_HEADER, CERTIFICATION_HEADER, LabRunner
from main import main
from models.certification import CertificationReport

pytestmark = pytest.mark.integration

SHORT_WAVE = "c = 2.5\ntau = 0.4\nleft_length = 30\nright_length = 60\n"
SHORT_PDE = "pde_domain = 400\npde_dx = 0.5\npde_final_time = 20\npde_sample_interval = 0.5\n"


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


def summary(output_dir) -> str:
    return (output_dir / "summary.txt").read_text(encoding="utf-8")


@pytest.fixture
def output_dir(lab_env):
    return lab_env / "output"


class TestBoundary:
    """Test the crossing-curve command"""

    def test_single_speed(self, lab_env, make_config, output_dir):
        assert main([str(make_config("command = boundary\nc = 2\ntau = 1.5\n"))]) == 0
        rows = read_csv(output_dir / "boundary.csv")
        assert rows[0] == BOUNDARY_HEADER
        assert float(rows[1][1]) == pytest.approx(1.8617, abs=1e-3)
        assert float(rows[1][2]) == pytest.approx(0.48587, abs=1e-5)
        text = summary(output_dir)
        assert "verdict = PASS" in text
        assert "reconstructed" in text

    def test_bisection_cross_check(self, lab_env, make_config, output_dir):
        config = make_config("command = boundary\nc = 2\ntau = 1.5\nc_values = 2, 5\nbisect = true\n")
        assert main([str(config)]) == 0
        rows = read_csv(output_dir / "boundary_bisection.csv")
        assert rows[0] == ["c", "tau_star", "tau_bisect", "difference"]
        assert all(float(row[3]) <= 1e-4 for row in rows[1:])
        assert (output_dir / "boundary.svg").exists()


class TestBounds:
    """Test the bounds table and the invariant suite"""

    CONFIG = "command = bounds\nc = 2\ntau = 1.5\nx_min = -2\nx_max = 4\nx_points = 13\n"

    def test_table(self, lab_env, make_config, output_dir):
        assert main([str(make_config(self.CONFIG))]) == 0
        rows = read_csv(output_dir / "bounds.csv")
        assert rows[0] == BOUNDS_HEADER
        assert len(rows) == 14
        assert (output_dir / "bounds.svg").exists()

    def test_output_is_reproducible(self, lab_env, make_config, output_dir):
        config = str(make_config(self.CONFIG))
        assert main([config]) == 0
        first = (output_dir / "bounds.csv").read_bytes()
        first_svg = (output_dir / "bounds.svg").read_bytes()
        assert main([config]) == 0
        assert (output_dir / "bounds.csv").read_bytes() == first
        assert (output_dir / "bounds.svg").read_bytes() == first_svg

    def test_delay_outside_bounding_range(self, lab_env, make_config, output_dir):
        assert main([str(make_config(self.CONFIG)), "tau=0.9"]) == 2
        assert "verdict = ERROR" in summary(output_dir)

    def test_verify(self, lab_env, make_config, output_dir):
        config = make_config("command = verify\nc = 2\ntau = 1.5\ntau_values = 1.25, 1.5\nx_min = -1\nx_max = 4\nx_points = 6\n")
        assert main([str(config)]) == 0
        rows = read_csv(output_dir / "verification.csv")
        assert rows[0] == CERTIFICATION_HEADER
        assert all(row[5] == "true" for row in rows[1:])
        assert any(row[1].startswith("c=2 tau=1.25:") for row in rows[1:])


class TestWaveAndSimulate:
    """Test the profile and PDE commands on short domains"""

    def test_wave(self, lab_env, make_config, output_dir):
        assert main([str(make_config("command = wave\n" + SHORT_WAVE))]) == 0
        rows = read_csv(output_dir / "profile.csv")
        assert rows[0] == ["t", "phi", "dphi", "x_log", "y"]
        assert float(rows[1][1]) == pytest.approx(1e-6)
        assert "left_decay_rate" in summary(output_dir)

    def test_wave_not_converged(self, lab_env, make_config, output_dir):
        config = make_config("command = wave\n" + SHORT_WAVE + "newton_max_iter = 1\n")
        assert main([str(config)]) == 3
        assert "verdict = NOT CONVERGED" in summary(output_dir)

    def test_simulate(self, lab_env, make_config, output_dir):
        config = make_config("command = simulate\nc = 2\ntau = 1.5\n" + SHORT_PDE)
        assert main([str(config), "emit_svg=false"]) == 0
        assert read_csv(output_dir / "front.csv")[0] == ["t", "front"]
        assert read_csv(output_dir / "comoving.csv")[0] == ["xi", "u"]
        assert not (output_dir / "front.svg").exists()
        assert "front_speed" in summary(output_dir)

    def test_simulate_unstable_step(self, lab_env, make_config):
        config = make_config("command = simulate\nc = 2\ntau = 1.5\n" + SHORT_PDE + "pde_dt = 0.3\n")
        assert main([str(config)]) == 2


class TestCertify:
    """Test the certify command"""

    def test_trivial_delay(self, lab_env, make_config, output_dir):
        assert main([str(make_config("command = certify\nc = 2\ntau = 0.9\n"))]) == 0
        assert read_csv(output_dir / "certification.csv") == [CERTIFICATION_HEADER]
        assert "trivially certified" in (output_dir / "report.txt").read_text(encoding="utf-8")

    def test_failed_check_exit_code(self, lab_env, make_config, output_dir, mocker):
        report = CertificationReport(m_star=-0.2, M_star=0.3)
        report.add_less("tail_limit", "tail", 0.3, 1e-3, 0.0)
        mocker.patch.object(LabRunner, "certify_pair", return_value=report)

        assert main([str(make_config("command = certify\nc = 2\ntau = 1.5\n"))]) == 1
        rows = read_csv(output_dir / "certification.csv")
        assert rows[1][0] == "tail_limit"
        assert rows[1][5] == "false"
        assert "verdict = FAIL" in summary(output_dir)

    def test_sweep_writes_one_record_per_pair(self, lab_env, make_config, output_dir):
        config = make_config("command = certify\nc = 2\ntau = 0.5\ntau_values = 0.5, 1.0\n")
        assert main([str(config)]) == 0
        assert (output_dir / "oscillation_c2_tau0.5.csv").exists()
        assert (output_dir / "oscillation_c2_tau1.csv").exists()


class TestErrors:
    """Test exit codes of failures outside the numerics"""

    def test_parse_error(self, lab_env, make_config):
        assert main([str(make_config("c 2\n"))]) == 2

    def test_unexpected_error(self, lab_env, make_config, output_dir, mocker):
        mocker.patch("core.runner.boundary_curve", side_effect=RuntimeError("boom"))
        assert main([str(make_config("command = boundary\nc = 2\ntau = 1.5\n"))]) == 1
        assert "RuntimeError: boom" in summary(output_dir)
