"""Pytest configuration and shared fixtures."""
import json
import os
import tempfile
import pytest
from pathlib import Path
from unittest.mock import patch

from ionphonon.chain.geometry import microtrap_positions, solve_paul_trap_positions
from ionphonon.chain.model import apply_site_pattern, build_model
from ionphonon.core.config import Config


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale DMRG runs that take minutes")


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture(autouse=True)
def clean_env():
    """Keep IONPHONON_* variables from the developer's shell out of the tests."""
    cleared = {key: "" for key in os.environ if key.startswith("IONPHONON_")}
    with patch.dict(os.environ, cleared):
        yield


@pytest.fixture
def microtrap_model():
    """Four microtrap sites, one phonon per site, moderate repulsion."""
    return build_model(microtrap_positions(4), u_over_t=1.0, n_phonons=4, n_max=4)


@pytest.fixture
def paul_model():
    """Five ions in a harmonic trap with n_max = 5."""
    return build_model(solve_paul_trap_positions(5), u_over_t=3.0, n_phonons=5, n_max=5)


@pytest.fixture
def free_model():
    """Non-interacting microtrap chain where n_max does not truncate."""
    return build_model(microtrap_positions(4), u_over_t=0.0, n_phonons=4, n_max=4)


@pytest.fixture
def alternating_classical_model():
    """t = 0, filling two, U_even = 2 U_odd: a six-fold degenerate ground manifold."""
    model = build_model(microtrap_positions(4), u_over_t=1.0, n_phonons=8, n_max=4)
    return apply_site_pattern(model, "alternating", 1.0, 2.0).classical_limit()


@pytest.fixture
def run_config_data(temp_dir):
    """A small sweep that runs in seconds with both solvers."""
    return {
        "trap": {"kind": "microtrap", "n_ions": 4},
        "model": {"sweep": [0.5, 2.0], "n_phonons": 4, "n_max": 4},
        "solver": {"mode": "both", "kept_states": 100, "max_sweeps": 6},
        "analysis": {"fits": []},
        "output": {"directory": str(temp_dir / "results")},
    }


@pytest.fixture
def test_config_file(temp_dir, run_config_data):
    """Create a test configuration file."""
    config_file = temp_dir / "test_config.json"
    config_file.write_text(json.dumps(run_config_data))
    return config_file


@pytest.fixture
def test_config(test_config_file):
    """Create a test configuration instance."""
    return Config(str(test_config_file))


@pytest.fixture
def mock_env_vars(temp_dir):
    """Mock environment variables for testing."""
    env_vars = {
        "IONPHONON_OUTPUT_DIR": str(temp_dir / "env_results"),
        "IONPHONON_WORKERS": "3",
        "IONPHONON_LOG_LEVEL": "info",
    }

    with patch.dict(os.environ, env_vars):
        yield env_vars
