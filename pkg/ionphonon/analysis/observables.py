"""Physical observables derived from raw ground-state measurements."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..chain.model import SitePattern
from ..core.errors import InvalidInputError, SpinMappingError, ZeroDensityError
from ..core.solver import Measurements

logger = logging.getLogger(__name__)

ZERO_DENSITY = 1e-14


@dataclass
class ObservableReport:
    """Profiles, correlation matrices and order parameters of one ground state.

    Matrices are 0-based; ``hopping`` and ``density_density`` keep the raw
    expectation values so fits can be redone without solving again.
    """

    density: np.ndarray
    fluctuations: np.ndarray
    density_squared: np.ndarray
    caa: Optional[np.ndarray]
    cnn: Optional[np.ndarray]
    hopping: Optional[np.ndarray]
    density_density: Optional[np.ndarray]
    tonks_O: float
    attractive_O: float
    spin_corr: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_sites(self) -> int:
        return int(self.density.size)

    def scalars(self) -> Dict[str, float]:
        return {
            "total_phonons": float(self.density.sum()),
            "tonks_O": self.tonks_O,
            "attractive_O": self.attractive_O,
            "max_fluctuation": float(self.fluctuations.max()),
        }


def build_report(raw: Measurements, metadata: Optional[Dict[str, Any]] = None,
                 rescale: bool = True) -> ObservableReport:
    """Rescaled correlators and order parameters from raw measurements.

    C^aa_ij = <a+_i a_j> / sqrt(<n_i><n_j>), C^nn_ij = <n_i n_j> - <n_i><n_j>,
    tonks_O = sum <n_i (n_i - 1)> / N, attractive_O = sum <n_i^2> / N^2.
    """
    density = np.asarray(raw.density, dtype=float)
    density_squared = np.asarray(raw.density_squared, dtype=float)
    n_sites = density.size

    variance = density_squared - density ** 2
    fluctuations = np.sqrt(np.clip(variance, 0.0, None))

    caa = None
    if raw.hopping is not None and rescale:
        empty = np.flatnonzero(density <= ZERO_DENSITY)
        if empty.size:
            raise ZeroDensityError(int(empty[0]) + 1)
        scale = np.sqrt(np.outer(density, density))
        caa = raw.hopping / scale
        np.fill_diagonal(caa, 1.0)

    cnn = None
    if raw.density_density is not None:
        cnn = raw.density_density - np.outer(density, density)

    return ObservableReport(
        density=density,
        fluctuations=fluctuations,
        density_squared=density_squared,
        caa=caa,
        cnn=cnn,
        hopping=raw.hopping,
        density_density=raw.density_density,
        tonks_O=float(np.sum(density_squared - density) / n_sites),
        attractive_O=float(np.sum(density_squared) / n_sites ** 2),
        metadata=dict(metadata or {}),
    )


def spin_weights(n_sites: int) -> np.ndarray:
    """c_i = sqrt(3) on odd sites and sqrt(2) on even sites (1-based)."""
    labels = np.arange(1, n_sites + 1)
    return np.where(labels % 2 == 1, np.sqrt(3.0), np.sqrt(2.0))


def _require_spin_regime(report: ObservableReport) -> None:
    if report.metadata.get("site_pattern") != SitePattern.ALTERNATING.value:
        raise SpinMappingError("spin map needs a run with alternating on-site interactions")
    if report.hopping is None:
        raise SpinMappingError("spin map needs hopping correlations")


def spin_correlator(report: ObservableReport, i0: int) -> np.ndarray:
    """<s+_i0 s-_j> = <a+_i0 a_j> / (c_i0 c_j) for all j; ``i0`` is 1-based."""
    _require_spin_regime(report)
    if not 1 <= i0 <= report.n_sites:
        raise InvalidInputError(f"reference site must lie in 1..{report.n_sites}, got {i0}")
    weights = spin_weights(report.n_sites)
    correlator = report.hopping[i0 - 1] / (weights[i0 - 1] * weights)
    report.spin_corr = correlator
    return correlator


def spin_magnetization(report: ObservableReport) -> np.ndarray:
    """<s^z_i> = 2 (<n_i> - b_i) - 1 with b_i = 2 on odd and 1 on even sites."""
    _require_spin_regime(report)
    labels = np.arange(1, report.n_sites + 1)
    base = np.where(labels % 2 == 1, 2.0, 1.0)
    return 2.0 * (report.density - base) - 1.0


def effective_xy_coupling(t: float = 1.0) -> float:
    """Exchange of the two-level model at filling two: J = sqrt(6) t."""
    return float(np.sqrt(6.0) * t)


def correlation_profile(matrix: np.ndarray, i0: int, side: str = "mean",
                        signed: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """|C(i0, i0 +- r)| against r = 1, 2, ... for a 1-based reference site.

    ``matrix`` is a full correlation matrix or the row of i0 alone.
    ``side`` picks the sites right of i0, left of it, or the mean of both
    where both exist. Both sides are averaged with their signs, so a node
    on one side is not filled in by the other; ``signed`` keeps the signs
    in the result.
    """
    matrix = np.asarray(matrix)
    n_sites = matrix.shape[-1]
    if not 1 <= i0 <= n_sites:
        raise InvalidInputError(f"reference site must lie in 1..{n_sites}, got {i0}")
    row = np.asarray(matrix if matrix.ndim == 1 else matrix[i0 - 1], dtype=float)
    centre = i0 - 1
    right = row[centre + 1:]
    left = row[:centre][::-1]

    if side == "right":
        values = right
    elif side == "left":
        values = left
    elif side == "mean":
        length = max(right.size, left.size)
        values = np.empty(length)
        for r in range(length):
            pair = [side_values[r] for side_values in (right, left) if r < side_values.size]
            values[r] = np.mean(pair)
    else:
        raise InvalidInputError(f"side must be right, left or mean, got {side!r}")
    values = np.array(values) if signed else np.abs(values)
    return np.arange(1, values.size + 1, dtype=float), values
