"""Tests for ionphonon.core.config module."""
import json
from pathlib import Path

import pytest

from ionphonon.chain.geometry import TrapKind
from ionphonon.core.config import Config, get_config, init_config
from ionphonon.core.errors import ConfigError, InfeasibleSectorError


class TestConfig:
    """Test suite for Config class."""

    def test_default_config_initialization(self):
        # Given: No config file provided

        # When: Creating a Config instance
        config = Config()

        # Then: Should have default configuration values
        assert config.get("trap.kind") == "microtrap"
        assert config.get("solver.mode") == "dmrg"
        assert config.get("solver.kept_states") == 100
        assert config.get("model.cutoff") == "full"
        assert config.get("output.significant_digits") == 12

    def test_config_file_loading(self, test_config_file):
        # Given: A valid config file exists

        # When: Creating Config with config file path
        config = Config(str(test_config_file))

        # Then: Should merge file config with defaults
        assert config.get("trap.n_ions") == 4
        assert config.get("model.sweep") == [0.5, 2.0]
        assert config.get("solver.mode") == "both"

        # Default values should still be present if not overridden
        assert config.get("trap.beta_x") == 0.02
        assert config.get("solver.energy_tol") == 1e-9

    def test_config_file_nonexistent(self):
        # Given: Config file path that doesn't exist

        # When / Then: Creating Config instance names the problem
        with pytest.raises(ConfigError, match="file not found"):
            Config("/nonexistent/path/config.json")

    def test_config_file_invalid_json(self, temp_dir):
        # Given: A file that is not JSON
        path = temp_dir / "broken.json"
        path.write_text("{trap: ")

        # When / Then
        with pytest.raises(ConfigError, match="invalid JSON"):
            Config(str(path))

    def test_unknown_key_is_rejected(self, temp_dir):
        # Given: A config with a misspelt key
        path = temp_dir / "typo.json"
        path.write_text(json.dumps({"solver": {"kept_sates": 50}}))

        # When / Then: The error names the dotted field
        with pytest.raises(ConfigError) as exc_info:
            Config(str(path))
        assert exc_info.value.field == "solver.kept_sates"

    def test_unknown_section_is_rejected(self):
        with pytest.raises(ConfigError) as exc_info:
            Config.from_dict({"plots": {"dpi": 300}})
        assert exc_info.value.field == "plots"

    def test_dot_notation_get_nonexistent_key(self):
        # Given: Config instance
        config = Config()

        # When: Accessing non-existent key with dot notation
        # Then: Should return default value
        assert config.get("nonexistent.key") is None
        assert config.get("solver.nonexistent", 42) == 42

    def test_set_rejects_unknown_key(self):
        config = Config()

        config.set("solver.kept_states", 60)

        assert config.get("solver.kept_states") == 60
        with pytest.raises(ConfigError):
            config.set("solver.bond_dimension", 60)


class TestDerivedValues:
    """Defaults that depend on other fields."""

    def test_phonon_number_defaults_to_one_per_site(self):
        config = Config.from_dict({"trap": {"n_ions": 7}})

        assert config.get_n_phonons() == 7

    def test_n_max_defaults_to_six_times_filling(self):
        # Given: Filling one half
        config = Config.from_dict({"trap": {"n_ions": 10}, "model": {"n_phonons": 5}})

        # Then: n_max = ceil(6 * 0.5)
        assert config.get_n_max() == 3

    def test_n_max_defaults_for_filling_two(self):
        config = Config.from_dict({"trap": {"n_ions": 10}, "model": {"n_phonons": 20}})

        assert config.get_n_max() == 12

    def test_reference_site_default(self):
        config = Config.from_dict({"trap": {"n_ions": 10}})

        assert config.get_reference_site() == 6

    def test_sweep_values(self):
        fixed = Config.from_dict({"model": {"u_over_t": 3.0}})
        swept = Config.from_dict({"model": {"sweep": [1.0, 2.0]}})
        ratio = Config.from_dict({"model": {"sweep_parameter": "even_ratio", "even_ratio": 1.5}})

        assert fixed.get_sweep_values() == [3.0]
        assert swept.get_sweep_values() == [1.0, 2.0]
        assert ratio.get_sweep_values() == [1.5]

    def test_to_dict_resolves_defaults(self):
        config = Config.from_dict({"trap": {"n_ions": 6}})

        resolved = config.to_dict()

        assert resolved["model"]["n_phonons"] == 6
        assert resolved["model"]["n_max"] == 6
        assert resolved["observables"]["reference_site"] == 4
        # The stored configuration is untouched
        assert config.get("model.n_max") is None

    def test_typed_sections(self):
        config = Config.from_dict({
            "trap": {"kind": "paul", "n_ions": 5},
            "solver": {"kept_states": 40, "seed": 3},
        })

        trap = config.get_trap_config()
        settings = config.get_solver_settings()

        assert trap.kind is TrapKind.PAUL
        assert trap.n_ions == 5
        assert settings["kept_states"] == 40
        assert settings["seed"] == 3
        assert settings["n_max"] == 6


class TestValidation:
    """Config.validate() diagnostics."""

    def test_valid_config_passes(self, test_config):
        test_config.validate()

    def test_infeasible_sector(self):
        # Given: More phonons than the per-site cap allows
        config = Config.from_dict({"trap": {"n_ions": 4}, "model": {"n_phonons": 9, "n_max": 2}})

        # When / Then
        with pytest.raises(InfeasibleSectorError, match="model.n_max"):
            config.validate()

    @pytest.mark.parametrize("section,key,value", [
        ("trap", "kind", "penning"),
        ("trap", "n_ions", 0),
        ("trap", "beta_x", -0.1),
        ("model", "pattern", "checkerboard"),
        ("model", "sweep", [2.0, 1.0]),
        ("model", "sweep", []),
        ("model", "cutoff", 0),
        ("solver", "mode", "qmc"),
        ("solver", "kept_states", 0),
        ("observables", "reference_site", 11),
        ("observables", "correlation_side", "both"),
        ("analysis", "fits", ["spline"]),
        ("analysis", "power_window", [5, 2]),
        ("run", "workers", 0),
    ])
    def test_invalid_field_is_named(self, section, key, value):
        # Given: One bad field
        config = Config.from_dict({section: {key: value}})

        # When / Then: The diagnostic names it
        with pytest.raises(ConfigError) as exc_info:
            config.validate()
        assert exc_info.value.field == f"{section}.{key}"

    def test_spin_map_needs_alternating_pattern(self):
        config = Config.from_dict({"observables": {"spin_map": True}})

        with pytest.raises(ConfigError, match="alternating"):
            config.validate()

    def test_left_right_needs_even_chain(self):
        config = Config.from_dict({"trap": {"n_ions": 5}, "model": {"pattern": "left_right"}})

        with pytest.raises(ConfigError) as exc_info:
            config.validate()
        assert exc_info.value.field == "model.pattern"

    @pytest.mark.parametrize("path", sorted((Path(__file__).parent.parent / "configs").glob("*/*.json")),
                             ids=lambda p: f"{p.parent.name}/{p.stem}")
    def test_shipped_configs_validate(self, path):
        Config(str(path)).validate()


class TestEnvironment:
    """IONPHONON_* overrides."""

    def test_environment_overrides(self, mock_env_vars):
        # Given: Environment variables are set

        # When: Creating Config instance
        config = Config()

        # Then: Should use environment variable values
        assert config.get_output_directory() == mock_env_vars["IONPHONON_OUTPUT_DIR"]
        assert config.get_workers() == 3
        assert config.get_log_level() == "INFO"

    def test_environment_beats_file(self, mock_env_vars, test_config_file):
        config = Config(str(test_config_file))

        assert config.get_output_directory() == mock_env_vars["IONPHONON_OUTPUT_DIR"]

    def test_bad_worker_count(self, monkeypatch):
        monkeypatch.setenv("IONPHONON_WORKERS", "many")

        with pytest.raises(ConfigError) as exc_info:
            Config()
        assert exc_info.value.field == "run.workers"


class TestGlobalConfig:
    """Test suite for global configuration functions."""

    def test_init_config_replaces_global(self, test_config_file):
        # When: Initializing with a file
        config = init_config(str(test_config_file))

        # Then: get_config returns the same instance
        assert get_config() is config
        assert get_config().get_n_ions() == 4
