"""Configuration management for ionphonon runs."""

import copy
import json
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from .errors import ConfigError, InfeasibleSectorError

SOLVER_MODES = ("ed", "dmrg", "both")
TRAP_KINDS = ("microtrap", "paul")
SITE_PATTERNS = ("uniform", "alternating", "left_right")
SWEEP_PARAMETERS = ("u_over_t", "even_ratio")
FIT_KINDS = (
    "power_law",
    "exponential",
    "density_power_law",
    "density_exponential",
    "spin_power_law",
    "luttinger",
    "critical_point",
)
CORRELATION_SIDES = ("right", "left", "mean")

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "trap": {
        "kind": "microtrap",
        "n_ions": 10,
        "spacing_d0": None,
        "axial_frequency": None,
        "radial_frequency": 12.5e6,
        "beta_x": 0.02,
        "tolerance": 1e-12,
    },
    "model": {
        "u_over_t": 1.0,
        "sweep": None,
        "sweep_parameter": "u_over_t",
        "pattern": "uniform",
        "even_ratio": 2.0,
        "n_phonons": None,
        "n_max": None,
        "cutoff": "full",
        "flat_onsite": False,
    },
    "solver": {
        "mode": "dmrg",
        "kept_states": 100,
        "max_sweeps": 12,
        "energy_tol": 1e-9,
        "seed": 0,
        "gap": False,
        "checkpoint": None,
    },
    "observables": {
        "reference_site": None,
        "spin_map": False,
        "correlation_side": "mean",
    },
    "analysis": {
        "fits": ["power_law", "exponential"],
        "power_window": None,
        "exp_window": None,
        "critical_range": None,
        "critical_auto": False,
    },
    "output": {
        "directory": "results",
        "significant_digits": 12,
    },
    "units": {
        "enabled": False,
        "ion_mass_amu": None,
    },
    "run": {
        "workers": 1,
    },
}


class Config:
    """Run configuration: defaults merged with a JSON file and the environment."""

    def __init__(self, config_path: Optional[str] = None):
        """Initialize configuration."""
        # Environment overrides may live in a .env file
        load_dotenv()

        self._config = copy.deepcopy(DEFAULTS)
        self.source_path = config_path

        if config_path:
            path = Path(config_path)
            if not path.exists():
                raise ConfigError("config", f"file not found: {config_path}")
            with open(path, "r") as f:
                try:
                    file_config = json.load(f)
                except json.JSONDecodeError as exc:
                    raise ConfigError("config", f"invalid JSON: {exc}") from exc
            self._merge_config(file_config)

        self._apply_environment()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Config":
        """Build a configuration from an in-memory mapping."""
        config = cls()
        config._merge_config(data)
        config._apply_environment()
        return config

    def _merge_config(self, new_config: Dict[str, Any]) -> None:
        """Merge new configuration with existing; unknown keys are rejected."""
        if not isinstance(new_config, dict):
            raise ConfigError("config", "top level must be an object")
        for section, values in new_config.items():
            if section not in self._config:
                raise ConfigError(section, "unknown section")
            if not isinstance(values, dict):
                raise ConfigError(section, "section must be an object")
            for key, value in values.items():
                if key not in self._config[section]:
                    raise ConfigError(f"{section}.{key}", "unknown key")
                self._config[section][key] = value

    def _apply_environment(self) -> None:
        """Apply IONPHONON_* environment overrides."""
        output_dir = os.getenv("IONPHONON_OUTPUT_DIR")
        if output_dir:
            self._config["output"]["directory"] = output_dir
        workers = os.getenv("IONPHONON_WORKERS")
        if workers:
            try:
                self._config["run"]["workers"] = int(workers)
            except ValueError as exc:
                raise ConfigError("run.workers", f"IONPHONON_WORKERS is not an integer: {workers}") from exc

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value by dot notation key."""
        keys = key.split(".")
        value: Any = self._config

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def set(self, key: str, value: Any) -> None:
        """Set an existing configuration value by dot notation key."""
        section, _, name = key.partition(".")
        if section not in self._config or name not in self._config[section]:
            raise ConfigError(key, "unknown key")
        self._config[section][name] = value

    def to_dict(self) -> Dict[str, Dict[str, Any]]:
        """Return a deep copy of the configuration with derived defaults filled in."""
        resolved = copy.deepcopy(self._config)
        resolved["model"]["n_phonons"] = self.get_n_phonons()
        resolved["model"]["n_max"] = self.get_n_max()
        resolved["observables"]["reference_site"] = self.get_reference_site()
        return resolved

    # Derived values

    def get_n_ions(self) -> int:
        """Get the number of ions in the chain."""
        return int(self.get("trap.n_ions"))

    def get_n_phonons(self) -> int:
        """Get the conserved phonon number (defaults to one per site)."""
        n_phonons = self.get("model.n_phonons")
        return self.get_n_ions() if n_phonons is None else int(n_phonons)

    def get_n_max(self) -> int:
        """Get the per-site cap (defaults to six times the mean filling, rounded up)."""
        n_max = self.get("model.n_max")
        if n_max is not None:
            return int(n_max)
        return max(1, math.ceil(6 * self.get_n_phonons() / self.get_n_ions()))

    def get_reference_site(self) -> int:
        """Get the 1-based reference site for correlation profiles."""
        site = self.get("observables.reference_site")
        if site is None:
            return math.ceil(self.get_n_ions() / 2) + 1 if self.get_n_ions() > 1 else 1
        return int(site)

    def get_sweep_values(self) -> List[float]:
        """Get the values of the swept parameter, or the single fixed value."""
        sweep = self.get("model.sweep")
        if sweep:
            return [float(v) for v in sweep]
        if self.get("model.sweep_parameter") == "even_ratio":
            return [float(self.get("model.even_ratio"))]
        return [float(self.get("model.u_over_t"))]

    def get_workers(self) -> int:
        """Get the number of concurrent sweep workers."""
        return int(self.get("run.workers", 1))

    def get_output_directory(self) -> str:
        """Get the report directory."""
        return str(self.get("output.directory", "results"))

    def get_log_level(self) -> str:
        """Get the log level from the environment."""
        return (os.getenv("IONPHONON_LOG_LEVEL") or "WARNING").upper()

    # Typed section views

    def get_trap_config(self):
        """Get the trap section as a TrapConfig."""
        from ..chain.geometry import TrapConfig

        trap = self._config["trap"]
        return TrapConfig(
            kind=trap["kind"],
            n_ions=int(trap["n_ions"]),
            spacing_d0=trap["spacing_d0"],
            axial_frequency=trap["axial_frequency"],
            radial_frequency=float(trap["radial_frequency"]),
            beta_x=float(trap["beta_x"]),
        )

    def get_solver_settings(self) -> Dict[str, Any]:
        """Get solver settings as a plain mapping."""
        settings = dict(self._config["solver"])
        settings["n_max"] = self.get_n_max()
        return settings

    # Validation

    def validate(self) -> None:
        """Check every field; raise ConfigError naming the first bad one."""
        trap = self._config["trap"]
        model = self._config["model"]
        solver = self._config["solver"]

        _require_choice("trap.kind", trap["kind"], TRAP_KINDS)
        _require_int("trap.n_ions", trap["n_ions"], minimum=1)
        _require_positive("trap.radial_frequency", trap["radial_frequency"])
        _require_positive("trap.beta_x", trap["beta_x"])
        _require_positive("trap.tolerance", trap["tolerance"])
        for key in ("spacing_d0", "axial_frequency"):
            if trap[key] is not None:
                _require_positive(f"trap.{key}", trap[key])

        _require_choice("model.pattern", model["pattern"], SITE_PATTERNS)
        _require_choice("model.sweep_parameter", model["sweep_parameter"], SWEEP_PARAMETERS)
        _require_number("model.u_over_t", model["u_over_t"])
        _require_number("model.even_ratio", model["even_ratio"])
        _require_sweep("model.sweep", model["sweep"])
        if model["pattern"] == "left_right" and self.get_n_ions() % 2:
            raise ConfigError("model.pattern", "left_right split needs an even number of ions")
        cutoff = model["cutoff"]
        if cutoff != "full":
            _require_int("model.cutoff", cutoff, minimum=1)
        if not isinstance(model["flat_onsite"], bool):
            raise ConfigError("model.flat_onsite", "must be true or false")
        if model["n_phonons"] is not None:
            _require_int("model.n_phonons", model["n_phonons"], minimum=0)
        if model["n_max"] is not None:
            _require_int("model.n_max", model["n_max"], minimum=1)

        n_ions = self.get_n_ions()
        n_phonons = self.get_n_phonons()
        n_max = self.get_n_max()
        if n_phonons > n_ions * n_max:
            raise InfeasibleSectorError(
                f"model.n_max: {n_phonons} phonons cannot fit on {n_ions} sites "
                f"with at most {n_max} per site (need n_max >= {math.ceil(n_phonons / n_ions)})"
            )

        _require_choice("solver.mode", solver["mode"], SOLVER_MODES)
        _require_int("solver.kept_states", solver["kept_states"], minimum=1)
        _require_int("solver.max_sweeps", solver["max_sweeps"], minimum=1)
        _require_positive("solver.energy_tol", solver["energy_tol"])
        _require_int("solver.seed", solver["seed"], minimum=0)
        if not isinstance(solver["gap"], bool):
            raise ConfigError("solver.gap", "must be true or false")

        site = self.get_reference_site()
        if not 1 <= site <= n_ions:
            raise ConfigError("observables.reference_site", f"must lie in 1..{n_ions}")
        _require_choice(
            "observables.correlation_side", self._config["observables"]["correlation_side"], CORRELATION_SIDES
        )
        if self._config["observables"]["spin_map"] and model["pattern"] != "alternating":
            raise ConfigError("observables.spin_map", "spin map needs the alternating pattern")

        analysis = self._config["analysis"]
        fits = analysis["fits"]
        if not isinstance(fits, list):
            raise ConfigError("analysis.fits", "must be a list")
        for fit in fits:
            _require_choice("analysis.fits", fit, FIT_KINDS)
        if "spin_power_law" in fits and model["pattern"] != "alternating":
            raise ConfigError("analysis.fits", "spin_power_law needs the alternating pattern")
        for key in ("power_window", "exp_window", "critical_range"):
            if analysis[key] is not None:
                _require_range(f"analysis.{key}", analysis[key])

        _require_int("output.significant_digits", self._config["output"]["significant_digits"], minimum=1)
        if self._config["units"]["ion_mass_amu"] is not None:
            _require_positive("units.ion_mass_amu", self._config["units"]["ion_mass_amu"])
        _require_int("run.workers", self._config["run"]["workers"], minimum=1)


def _require_choice(field: str, value: Any, choices) -> None:
    if value not in choices:
        raise ConfigError(field, f"expected one of {', '.join(choices)}, got {value!r}")


def _require_number(field: str, value: Any) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(field, f"expected a finite number, got {value!r}")


def _require_positive(field: str, value: Any) -> None:
    _require_number(field, value)
    if value <= 0:
        raise ConfigError(field, f"must be positive, got {value!r}")


def _require_int(field: str, value: Any, minimum: int) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(field, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(field, f"must be >= {minimum}, got {value}")


def _require_sweep(field: str, values: Any) -> None:
    if values is None:
        return
    if not isinstance(values, list) or not values:
        raise ConfigError(field, "must be a nonempty list")
    for value in values:
        _require_number(field, value)
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(field, "values must be strictly increasing")


def _require_range(field: str, values: Any) -> None:
    if not isinstance(values, list) or len(values) != 2:
        raise ConfigError(field, "expected [low, high]")
    for value in values:
        _require_number(field, value)
    if values[1] <= values[0]:
        raise ConfigError(field, "high must exceed low")


# Global configuration instance
_config_instance: Optional[Config] = None


def get_config() -> Config:
    """Get global configuration instance."""
    global _config_instance
    if _config_instance is None:
        _config_instance = Config()
    return _config_instance


def init_config(config_path: Optional[str] = None) -> Config:
    """Initialize global configuration with optional config file."""
    global _config_instance
    _config_instance = Config(config_path)
    return _config_instance
