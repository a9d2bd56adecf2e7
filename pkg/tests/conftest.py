"""
Pytest configuration and fixtures for KPP Front Lab tests
"""

import shutil
import sys
import tempfile
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from core.config import reset_config
from core.quadrature import DEFAULT_QUADRATURE
from models.params import ModelParams
from models.profiles import BvpGridConfig, NewtonConfig, PdeConfig


@pytest.fixture
def temp_dir():
    """
    Create a temporary directory for test files.
    Automatically cleaned up after test.
    """
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path, ignore_errors=True)


@pytest.fixture
def lab_env(monkeypatch, temp_dir):
    """
    Environment for one run: two worker threads, output under temp_dir.
    The configuration singleton is rebuilt before and after the test.
    """
    monkeypatch.setenv("KPP_FRONT_LAB_THREADS", "2")
    monkeypatch.setenv("KPP_FRONT_LAB_OUTPUT_DIR", str(temp_dir / "output"))
    monkeypatch.setenv("KPP_FRONT_LAB_LOG_LEVEL", "WARNING")
    reset_config()
    yield temp_dir
    reset_config()


@pytest.fixture
def params():
    """c = 2, tau = 3/2: the critical speed at the largest bounded delay"""
    return ModelParams(c=2.0, tau=1.5)


@pytest.fixture
def quad_cfg():
    return DEFAULT_QUADRATURE


@pytest.fixture
def small_grid():
    """Short domain with a coarse step for fast solver tests"""
    return BvpGridConfig(left_length=30.0, right_length=60.0)


@pytest.fixture
def newton_cfg():
    return NewtonConfig()


@pytest.fixture
def short_pde():
    """Minimal domain, coarse mesh, short horizon"""
    return PdeConfig(domain_length=400.0, dx=0.5, final_time=20.0, sample_interval=0.5)


@pytest.fixture(scope="session")
def critical_profile():
    """
    Boundary-value profile at c = 2, tau = 3/2 on the default grid.
    Solved once per session.
    """
    from core.bvp_solver import solve_profile_bvp

    return solve_profile_bvp(ModelParams(c=2.0, tau=1.5))


@pytest.fixture
def make_config(temp_dir):
    """
    Factory writing a run configuration file into temp_dir.
    Returns the path of the written file.
    """

    def write(text: str, name: str = "run.cfg") -> Path:
        path = temp_dir / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
