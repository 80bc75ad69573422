"""Bose-Hubbard coefficients for radial phonons of an ion chain.

Energies are measured in units of the largest tunneling t. The model is
immutable once built; every transformation returns a new instance.
"""

import dataclasses
import hashlib
import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Union

import numpy as np

from ..core.errors import InfeasibleSectorError, InvalidInputError, TrapDestabilizedError
from .geometry import ChainGeometry

logger = logging.getLogger(__name__)

FULL_RANGE = "full"
VALIDITY_FRACTION = 0.1


class SitePattern(str, Enum):
    """How on-site interactions vary along the chain."""

    UNIFORM = "uniform"
    ALTERNATING = "alternating"
    LEFT_RIGHT = "left_right"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class BoseHubbardModel:
    """H = sum t_ij (a+_i a_j + h.c.) + sum eps_i n_i + sum U_i n_i (n_i - 1)."""

    hopping: np.ndarray
    onsite_energy: np.ndarray
    onsite_interaction: np.ndarray
    n_max: int
    n_phonons: int
    hopping_range_cutoff: Union[int, str] = FULL_RANGE
    site_pattern: SitePattern = SitePattern.UNIFORM

    def __post_init__(self):
        hopping = _frozen(self.hopping)
        onsite_energy = _frozen(self.onsite_energy)
        onsite_interaction = _frozen(self.onsite_interaction)
        n_sites = onsite_energy.size

        if hopping.shape != (n_sites, n_sites) or onsite_interaction.shape != (n_sites,):
            raise InvalidInputError("hopping, onsite_energy and onsite_interaction disagree on N")
        if not (np.all(np.isfinite(hopping)) and np.all(np.isfinite(onsite_energy))
                and np.all(np.isfinite(onsite_interaction))):
            raise InvalidInputError("model coefficients must be finite")
        if not np.array_equal(hopping, hopping.T):
            raise InvalidInputError("hopping matrix must be symmetric")
        if np.any(np.diag(hopping) != 0) or np.any(hopping < 0):
            raise InvalidInputError("hopping must be nonnegative with zero diagonal")
        largest = hopping.max() if n_sites > 1 else 0.0
        if largest != 0 and abs(largest - 1.0) > 1e-12:
            raise InvalidInputError(f"largest tunneling must be 1 in units of t, got {largest}")
        if self.n_max < 1:
            raise InvalidInputError(f"n_max must be >= 1, got {self.n_max}")
        if not 0 <= self.n_phonons <= n_sites * self.n_max:
            raise InfeasibleSectorError(
                f"{self.n_phonons} phonons do not fit on {n_sites} sites with n_max={self.n_max}"
            )

        object.__setattr__(self, "hopping", hopping)
        object.__setattr__(self, "onsite_energy", onsite_energy)
        object.__setattr__(self, "onsite_interaction", onsite_interaction)
        object.__setattr__(self, "n_max", int(self.n_max))
        object.__setattr__(self, "n_phonons", int(self.n_phonons))
        object.__setattr__(self, "site_pattern", SitePattern(self.site_pattern))

    @property
    def n_sites(self) -> int:
        return int(self.onsite_energy.size)

    @property
    def mean_density(self) -> float:
        return self.n_phonons / self.n_sites

    def one_particle_matrix(self) -> np.ndarray:
        """Single-phonon Hamiltonian: hopping off the diagonal, eps_i on it."""
        return self.hopping + np.diag(self.onsite_energy)

    def with_onsite_shift(self, shift: float) -> "BoseHubbardModel":
        return dataclasses.replace(self, onsite_energy=self.onsite_energy + shift)

    def with_phonons(self, n_phonons: int, n_max: int = None) -> "BoseHubbardModel":
        return dataclasses.replace(self, n_phonons=n_phonons, n_max=self.n_max if n_max is None else n_max)

    def classical_limit(self) -> "BoseHubbardModel":
        """The t -> 0 limit: tunneling and the tunneling-induced shifts vanish."""
        zeros = np.zeros_like(self.hopping)
        return dataclasses.replace(self, hopping=zeros, onsite_energy=np.zeros(self.n_sites))

    def model_hash(self) -> str:
        """Stable digest of every coefficient, for report provenance."""
        digest = hashlib.sha256()
        for array in (self.hopping, self.onsite_energy, self.onsite_interaction):
            digest.update(np.ascontiguousarray(array, dtype="<f8").tobytes())
        digest.update(f"{self.n_max}:{self.n_phonons}:{self.hopping_range_cutoff}".encode())
        return digest.hexdigest()[:16]


def build_model(geometry: ChainGeometry, u_over_t: float, n_phonons: int, n_max: int,
                cutoff: Union[int, str] = FULL_RANGE, flat_onsite: bool = False) -> BoseHubbardModel:
    """Dipolar tunneling t_ij = (d0/|z_i - z_j|)^3 and its on-site shift eps_i = -sum_j t_ij.

    The shift always uses the uncut 1/r^3 sum; ``cutoff`` only removes
    tunneling beyond ``cutoff`` sites.
    """
    if n_max < 1:
        raise InvalidInputError(f"n_max must be >= 1, got {n_max}")
    n_sites = geometry.n_ions
    if n_phonons < 0 or n_phonons > n_sites * n_max:
        raise InfeasibleSectorError(
            f"{n_phonons} phonons do not fit on {n_sites} sites with n_max={n_max}"
        )

    z = geometry.positions
    distance = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(distance, np.inf)
    hopping = (geometry.min_spacing / distance) ** 3
    onsite_energy = -hopping.sum(axis=1)

    if cutoff != FULL_RANGE:
        if isinstance(cutoff, bool) or not isinstance(cutoff, (int, np.integer)) or cutoff < 1:
            raise InvalidInputError(f"cutoff must be 'full' or a positive integer, got {cutoff!r}")
        separation = np.abs(np.subtract.outer(np.arange(n_sites), np.arange(n_sites)))
        hopping[separation > cutoff] = 0.0
    if flat_onsite:
        onsite_energy = np.zeros(n_sites)

    return BoseHubbardModel(
        hopping=hopping,
        onsite_energy=onsite_energy,
        onsite_interaction=np.full(n_sites, float(u_over_t)),
        n_max=n_max,
        n_phonons=n_phonons,
        hopping_range_cutoff=cutoff,
    )


@dataclass(frozen=True)
class StandingWaveConfig:
    """Optical standing wave creating the phonon-phonon interaction.

    ``amplitude_F`` and ``radial_frequency`` share one energy unit.
    """

    amplitude_F: float
    lamb_dicke_eta: float
    delta: int
    radial_frequency: float

    def __post_init__(self):
        if self.lamb_dicke_eta < 0:
            raise InvalidInputError("lamb_dicke_eta must be nonnegative")
        if self.delta not in (0, 1):
            raise InvalidInputError(f"delta must be 0 or 1, got {self.delta}")
        if self.radial_frequency <= 0:
            raise InvalidInputError("radial_frequency must be positive")


class StandingWaveCoupling(NamedTuple):
    """Interaction strength and the shifted trap frequency it implies."""

    interaction: float
    shifted_radial_frequency: float
    depth_warning: bool
    interaction_warning: bool


def standing_wave_interaction(sw: StandingWaveConfig) -> StandingWaveCoupling:
    """U = 2 (-1)^delta F eta^4 and omega_x' = sqrt(omega_x (omega_x - (-1)^delta 4 eta^2 F)).

    Follows the sign of the formula literally: delta = 0 with F > 0 is
    repulsive, whatever side of the standing wave the ions sit on.
    """
    sign = -1.0 if sw.delta else 1.0
    eta2 = sw.lamb_dicke_eta ** 2
    omega = sw.radial_frequency

    radicand = omega * (omega - sign * 4 * eta2 * sw.amplitude_F)
    if radicand <= 0:
        raise TrapDestabilizedError(
            f"standing wave removes radial confinement (omega_x^2 term {radicand:.3g})"
        )

    interaction = 2 * sign * sw.amplitude_F * eta2 ** 2
    depth_warning = eta2 * abs(sw.amplitude_F) >= VALIDITY_FRACTION * omega
    interaction_warning = abs(sw.amplitude_F) * eta2 ** 2 >= VALIDITY_FRACTION * omega
    if depth_warning or interaction_warning:
        logger.warning("standing wave too strong for the phonon picture (eta^2 F=%.3g, F eta^4=%.3g)",
                       eta2 * sw.amplitude_F, sw.amplitude_F * eta2 ** 2)
    return StandingWaveCoupling(interaction, float(np.sqrt(radicand)), depth_warning, interaction_warning)


def apply_site_pattern(model: BoseHubbardModel, pattern: Union[SitePattern, str],
                       u_odd: float, u_even: float = None) -> BoseHubbardModel:
    """Set U_i by pattern; site parity and halves use 1-based labels.

    Uniform puts ``u_odd`` everywhere. Alternating puts ``u_odd`` on sites
    1, 3, ... and ``u_even`` on 2, 4, .... LeftRightSplit puts ``u_odd`` on
    the first half and ``u_even`` on the second.
    """
    pattern = SitePattern(pattern)
    n_sites = model.n_sites
    if pattern is not SitePattern.UNIFORM and u_even is None:
        raise InvalidInputError(f"{pattern.value} pattern needs u_even")

    if pattern is SitePattern.UNIFORM:
        interaction = np.full(n_sites, float(u_odd))
    elif pattern is SitePattern.ALTERNATING:
        labels = np.arange(1, n_sites + 1)
        interaction = np.where(labels % 2 == 1, float(u_odd), float(u_even))
    else:
        if n_sites % 2:
            raise InvalidInputError(f"left/right split needs an even number of sites, got {n_sites}")
        interaction = np.concatenate([np.full(n_sites // 2, float(u_odd)),
                                      np.full(n_sites // 2, float(u_even))])

    return dataclasses.replace(model, onsite_interaction=interaction, site_pattern=pattern)
