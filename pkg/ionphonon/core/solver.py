"""Base class shared by the ground-state solvers."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..chain.model import BoseHubbardModel
from .errors import InfeasibleSectorError, InvalidInputError


@dataclass
class Measurements:
    """Raw one- and two-point expectation values of a ground state.

    Arrays are indexed by 0-based site; ``hopping`` holds <a+_i a_j> and
    ``density_density`` holds <n_i n_j>.
    """

    density: np.ndarray
    density_squared: np.ndarray
    hopping: Optional[np.ndarray] = None
    density_density: Optional[np.ndarray] = None

    @property
    def n_sites(self) -> int:
        return int(self.density.size)


@dataclass
class GroundStateResult:
    """Energy, measurable state and bookkeeping of one solver run."""

    solver: str
    energy: float
    state: Any
    converged: bool = True
    degenerate: bool = False
    gap: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def measure(self, two_point: bool = True) -> Measurements:
        """Collect measurements from the underlying state."""
        return self.state.measurements(two_point=two_point)


class GroundStateSolver(ABC):
    """Abstract base class for all ground-state solvers."""

    def __init__(self, model: BoseHubbardModel, config: Optional[Dict[str, Any]] = None):
        """Initialize the solver with a model and solver settings."""
        self.model = model
        self.config = dict(config or {})
        self._check_sector()
        self._validate_config()

    @abstractmethod
    def _validate_config(self) -> None:
        """Validate solver specific configuration."""
        pass

    @abstractmethod
    def get_solver_name(self) -> str:
        """Get the name of this solver."""
        pass

    @abstractmethod
    def solve(self) -> GroundStateResult:
        """Find the ground state of the model's phonon-number sector."""
        pass

    def get_config_value(self, key: str, default: Any = None) -> Any:
        """Get a configuration value with optional default."""
        return self.config.get(key, default)

    def _check_sector(self) -> None:
        if self.model.n_phonons > self.model.n_sites * self.get_n_max():
            raise InfeasibleSectorError(
                f"{self.model.n_phonons} phonons do not fit on {self.model.n_sites} sites "
                f"with n_max={self.get_n_max()}"
            )

    def get_n_max(self) -> int:
        """Per-site cap: solver setting if given, otherwise the model's."""
        n_max = self.config.get("n_max")
        if n_max is None:
            return self.model.n_max
        if n_max < 1:
            raise InvalidInputError(f"n_max must be >= 1, got {n_max}")
        return int(n_max)
