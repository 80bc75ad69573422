"""Ion equilibrium positions and the length/frequency scales derived from them."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
from scipy import constants, optimize

from ..core.errors import ConvergenceError, InvalidInputError

logger = logging.getLogger(__name__)

RWA_WARNING_THRESHOLD = 0.1
DEFAULT_TOLERANCE = 1e-12
MAX_FORCE_EVALUATIONS = 2000
# iterate to round-off; the force residual is checked against tol afterwards
ROOT_XTOL = 4 * np.finfo(float).eps

# e^2 / (4 pi eps0) in SI units
COULOMB_CONSTANT = constants.e ** 2 / (4 * np.pi * constants.epsilon_0)


class TrapKind(str, Enum):
    """Trap geometries supported by the chain builder."""

    PAUL = "paul"
    MICROTRAP = "microtrap"


@dataclass(frozen=True)
class TrapConfig:
    """Physical description of the trap.

    Frequencies are angular frequencies; ``spacing_d0`` is the microtrap
    lattice constant (or the smallest ion distance of a Paul trap) in meters.
    """

    kind: TrapKind
    n_ions: int
    radial_frequency: float
    beta_x: float
    spacing_d0: Optional[float] = None
    axial_frequency: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", _as_kind(self.kind))
        if isinstance(self.n_ions, bool) or not isinstance(self.n_ions, (int, np.integer)) or self.n_ions < 1:
            raise InvalidInputError(f"n_ions must be a positive integer, got {self.n_ions!r}")
        if self.radial_frequency <= 0:
            raise InvalidInputError("radial_frequency must be positive")
        if self.beta_x <= 0:
            raise InvalidInputError("beta_x must be positive")
        if self.spacing_d0 is not None and self.spacing_d0 <= 0:
            raise InvalidInputError("spacing_d0 must be positive")
        if self.axial_frequency is not None and self.axial_frequency <= 0:
            raise InvalidInputError("axial_frequency must be positive")
        if self.rwa_warning:
            logger.warning(
                "beta_x/2 = %.3g is not small; phonon number is not conserved reliably", self.beta_x / 2
            )

    @property
    def rwa_warning(self) -> bool:
        """True when beta_x/2 reaches the rotating-wave threshold."""
        return self.beta_x / 2 >= RWA_WARNING_THRESHOLD


@dataclass(frozen=True)
class ChainGeometry:
    """Dimensionless equilibrium positions of the ion chain."""

    positions: np.ndarray
    min_spacing: float
    kind: TrapKind
    force_residual: float = field(default=0.0, compare=False)

    def __post_init__(self):
        positions = np.array(self.positions, dtype=float)
        if positions.ndim != 1 or positions.size == 0:
            raise InvalidInputError("positions must be a nonempty vector")
        if np.any(np.diff(positions) <= 0):
            raise InvalidInputError("positions must be strictly increasing")
        if self.min_spacing <= 0:
            raise InvalidInputError("min_spacing must be positive")
        positions.setflags(write=False)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "kind", _as_kind(self.kind))

    @property
    def n_ions(self) -> int:
        return int(self.positions.size)

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.positions)

    def scaled_positions(self, length_unit: float) -> np.ndarray:
        """Positions multiplied by a physical length unit."""
        return self.positions * length_unit


class HoppingScale(NamedTuple):
    """Hopping energy scale with its rotating-wave validity flag."""

    value: float
    rwa_warning: bool


def _as_kind(kind) -> TrapKind:
    try:
        return TrapKind(kind)
    except ValueError as exc:
        raise InvalidInputError(f"unknown trap kind {kind!r}") from exc


def _check_ion_count(n_ions: int) -> None:
    if isinstance(n_ions, bool) or not isinstance(n_ions, (int, np.integer)):
        raise InvalidInputError(f"n_ions must be an integer, got {n_ions!r}")
    if n_ions < 1:
        raise InvalidInputError(f"n_ions must be >= 1, got {n_ions}")


def coulomb_forces(z: np.ndarray) -> np.ndarray:
    """Net dimensionless force z_i - sum_j sign(z_i - z_j)/(z_i - z_j)^2 on each ion."""
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, np.inf)
    return z - np.sum(np.sign(diff) / diff ** 2, axis=1)


def _force_jacobian(z: np.ndarray) -> np.ndarray:
    diff = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(diff, np.inf)
    coupling = 2.0 / diff ** 3
    jacobian = -coupling
    np.fill_diagonal(jacobian, 1.0 + coupling.sum(axis=1))
    return jacobian


def solve_paul_trap_positions(n_ions: int, tol: float = DEFAULT_TOLERANCE,
                              max_iterations: int = MAX_FORCE_EVALUATIONS) -> ChainGeometry:
    """Equilibrium of N ions in a harmonic well, in units of the Coulomb length.

    Powell's hybrid root finder on the force balance with the analytic
    Jacobian, started from a stretched uniform grid. The root is made
    reflection antisymmetric before the residual is checked.
    """
    _check_ion_count(n_ions)
    if tol <= 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    if n_ions == 1:
        return ChainGeometry(np.zeros(1), 1.0, TrapKind.PAUL)

    index = np.arange(1, n_ions + 1)
    z0 = (index - (n_ions + 1) / 2) * (2.0 / n_ions ** 0.56)
    if max_iterations < 1:
        raise ConvergenceError(f"ion positions for N={n_ions} did not converge",
                               residual=float(np.max(np.abs(coulomb_forces(z0)))))

    solution = optimize.root(coulomb_forces, z0, jac=_force_jacobian, method="hybr",
                             options={"xtol": ROOT_XTOL, "maxfev": max_iterations})
    z = 0.5 * (solution.x - solution.x[::-1])
    residual = float(np.max(np.abs(coulomb_forces(z))))
    if np.any(np.diff(z) <= 0):
        raise ConvergenceError(f"root finder reordered ions for N={n_ions}", residual=residual)
    if residual > tol:
        raise ConvergenceError(f"ion positions for N={n_ions} did not converge: {solution.message}",
                               residual=residual)

    logger.debug("Paul trap positions for N=%d after %d force evaluations (residual %.2e)",
                 n_ions, solution.nfev, residual)
    return ChainGeometry(z, float(np.min(np.diff(z))), TrapKind.PAUL, force_residual=residual)


def microtrap_positions(n_ions: int) -> ChainGeometry:
    """One ion per microtrap on a unit grid."""
    _check_ion_count(n_ions)
    return ChainGeometry(np.arange(n_ions, dtype=float), 1.0, TrapKind.MICROTRAP)


def build_geometry(trap: TrapConfig, tol: float = DEFAULT_TOLERANCE) -> ChainGeometry:
    """Equilibrium positions for the trap described by ``trap``."""
    if trap.kind is TrapKind.PAUL:
        return solve_paul_trap_positions(trap.n_ions, tol)
    return microtrap_positions(trap.n_ions)


def hopping_scale(beta_x: float, omega_x: float) -> HoppingScale:
    """Largest tunneling t = beta_x * omega_x / 2 in the units of ``omega_x``."""
    if beta_x <= 0 or omega_x <= 0:
        raise InvalidInputError(f"beta_x and omega_x must be positive, got {beta_x}, {omega_x}")
    warning = beta_x / 2 >= RWA_WARNING_THRESHOLD
    if warning:
        logger.warning("t/omega_x = %.3g violates the rotating-wave condition", beta_x / 2)
    return HoppingScale(beta_x * omega_x / 2, warning)


def coulomb_length(ion_mass: float, axial_frequency: float) -> float:
    """Length unit (e^2 / (4 pi eps0 m omega_z^2))^(1/3) of Paul-trap positions, in meters."""
    if ion_mass <= 0 or axial_frequency <= 0:
        raise InvalidInputError("ion mass and axial frequency must be positive")
    return (COULOMB_CONSTANT / (ion_mass * axial_frequency ** 2)) ** (1.0 / 3.0)


def axial_frequency_for_spacing(ion_mass: float, d0: float, min_spacing: float) -> float:
    """Axial angular frequency at which the smallest ion distance equals ``d0`` meters."""
    if ion_mass <= 0 or d0 <= 0 or min_spacing <= 0:
        raise InvalidInputError("ion mass, d0 and min_spacing must be positive")
    length_unit = d0 / min_spacing
    return float(np.sqrt(COULOMB_CONSTANT / (ion_mass * length_unit ** 3)))


def beta_x_for(ion_mass: float, omega_x: float, d0: float) -> float:
    """Dimensionless Coulomb-to-trap ratio e^2 / (4 pi eps0 m omega_x^2 d0^3)."""
    if ion_mass <= 0 or omega_x <= 0 or d0 <= 0:
        raise InvalidInputError("ion mass, omega_x and d0 must be positive")
    return COULOMB_CONSTANT / (ion_mass * omega_x ** 2 * d0 ** 3)


def amu_to_kg(mass_amu: float) -> float:
    return mass_amu * constants.atomic_mass
