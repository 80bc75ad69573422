"""Decay fits of correlation functions and sweep-level extrapolations."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..core.errors import FitError, InvalidInputError, InvalidRegimeError, NonPositiveDataError, NotDecayingError

logger = logging.getLogger(__name__)

MIN_WINDOW_POINTS = 4
MIN_SWEEP_POINTS = 3
LINEAR_REGIME_R2 = 0.99


class FitKind(str, Enum):
    POWER_LAW = "power_law"
    EXPONENTIAL = "exponential"
    LUTTINGER_SCALING = "luttinger_scaling"
    LINEAR_EXTRAPOLATION = "linear_extrapolation"


@dataclass
class FitResult:
    """Fitted parameters with standard errors, the window used and r^2."""

    kind: FitKind
    parameters: Dict[str, float]
    errors: Dict[str, float]
    window: Tuple[float, float]
    r_squared: float
    extras: Dict[str, float] = field(default_factory=dict)

    def value(self, name: str) -> float:
        return self.parameters[name]

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind.value,
            "parameters": dict(self.parameters),
            "errors": dict(self.errors),
            "window": list(self.window),
            "r_squared": self.r_squared,
            **({"extras": dict(self.extras)} if self.extras else {}),
        }


def default_window(kind: FitKind, n_sites: int) -> Tuple[int, int]:
    """[2, N/4] for power laws and [2, N/3] for exponentials."""
    kind = FitKind(kind)
    if kind is FitKind.POWER_LAW:
        return 2, n_sites // 4
    if kind is FitKind.EXPONENTIAL:
        return 2, n_sites // 3
    raise InvalidInputError(f"no default window for {kind.value}")


def decaying_window(separations: Sequence[float], magnitudes: Sequence[float],
                    window: Tuple[float, float]) -> Tuple[float, float]:
    """Shorten ``window`` to the stretch where |C| keeps falling.

    A node, where contributions of opposite sign cancel, shows up as a local
    minimum of |C|; the window ends before that minimum.
    """
    r = np.asarray(separations, dtype=float)
    y = np.abs(np.asarray(magnitudes, dtype=float))
    low, high = window
    inside = np.flatnonzero((r >= low) & (r <= high))
    for position in range(1, inside.size):
        previous, current = inside[position - 1], inside[position]
        if y[current] >= y[previous]:
            end = inside[position - 2] if position >= 2 else previous
            return float(low), float(r[end])
    return float(low), float(high)


def _select(separations: Sequence[float], values: Sequence[float],
            window: Tuple[float, float]) -> Tuple[np.ndarray, np.ndarray]:
    r = np.asarray(separations, dtype=float)
    y = np.asarray(values, dtype=float)
    if r.shape != y.shape:
        raise InvalidInputError("separations and values differ in length")
    low, high = window
    if high < low or r.size == 0 or low > r.max() or high < r.min():
        raise InvalidInputError(f"window {window} lies outside the data range")
    mask = (r >= low) & (r <= high)
    if mask.sum() < MIN_WINDOW_POINTS:
        raise FitError(f"window {window} holds {mask.sum()} points; need {MIN_WINDOW_POINTS}")
    r, y = r[mask], y[mask]
    bad = r[y <= 0]
    if bad.size:
        raise NonPositiveDataError(bad)
    return r, y


def _r_squared(fit) -> float:
    return float(np.clip(fit.rvalue ** 2, 0.0, 1.0))


def fit_power_law(separations: Sequence[float], values: Sequence[float],
                  window: Tuple[float, float]) -> FitResult:
    """Least squares in log-log space: y ~ r^-alpha."""
    r, y = _select(separations, values, window)
    fit = stats.linregress(np.log(r), np.log(y))
    return FitResult(
        kind=FitKind.POWER_LAW,
        parameters={"alpha": float(-fit.slope), "log_amplitude": float(fit.intercept)},
        errors={"alpha": float(fit.stderr), "log_amplitude": float(fit.intercept_stderr)},
        window=(float(window[0]), float(window[1])),
        r_squared=_r_squared(fit),
    )


def fit_exponential(separations: Sequence[float], values: Sequence[float],
                    window: Tuple[float, float]) -> FitResult:
    """Least squares in lin-log space: y ~ exp(-r / xi)."""
    r, y = _select(separations, values, window)
    fit = stats.linregress(r, np.log(y))
    if fit.slope >= 0:
        raise NotDecayingError(f"log-slope {fit.slope:.3g} is not negative")
    xi = -1.0 / fit.slope
    return FitResult(
        kind=FitKind.EXPONENTIAL,
        parameters={"xi": float(xi), "log_amplitude": float(fit.intercept)},
        errors={"xi": float(fit.stderr / fit.slope ** 2), "log_amplitude": float(fit.intercept_stderr)},
        window=(float(window[0]), float(window[1])),
        r_squared=_r_squared(fit),
    )


def compare_decay_models(separations: Sequence[float], values: Sequence[float],
                         window: Tuple[float, float]) -> Dict[str, object]:
    """Power-law and exponential fits on one window, with the better r^2 named."""
    results: Dict[str, object] = {}
    for name, fitter in (("power_law", fit_power_law), ("exponential", fit_exponential)):
        try:
            results[name] = fitter(separations, values, window)
        except FitError as exc:
            logger.debug("%s fit rejected: %s", name, exc)
            results[name] = None
    scored = [(fit.r_squared, name) for name, fit in results.items() if fit is not None]
    results["preferred"] = max(scored)[1] if scored else None
    return results


def _linear_root(u: np.ndarray, inverse_xi: np.ndarray) -> FitResult:
    fit = stats.linregress(u, inverse_xi)
    if fit.slope <= 0:
        raise InvalidRegimeError(f"1/xi does not grow with U (slope {fit.slope:.3g})")
    slope, intercept = fit.slope, fit.intercept
    root = -intercept / slope

    # Delta method with cov(slope, intercept) = -mean(U) var(slope)
    var_slope = fit.stderr ** 2
    var_intercept = fit.intercept_stderr ** 2
    covariance = -np.mean(u) * var_slope
    d_slope, d_intercept = intercept / slope ** 2, -1.0 / slope
    variance = d_slope ** 2 * var_slope + d_intercept ** 2 * var_intercept + 2 * d_slope * d_intercept * covariance

    return FitResult(
        kind=FitKind.LINEAR_EXTRAPOLATION,
        parameters={"u_c": float(root), "slope": float(slope), "intercept": float(intercept)},
        errors={"u_c": float(np.sqrt(max(variance, 0.0))), "slope": float(fit.stderr),
                "intercept": float(fit.intercept_stderr)},
        window=(float(u.min()), float(u.max())),
        r_squared=_r_squared(fit),
    )


def extrapolate_critical_point(u_values: Sequence[float], xi_values: Sequence[float],
                               u_range: Optional[Tuple[float, float]] = None,
                               auto: bool = False) -> FitResult:
    """Root of a straight line through 1/xi against U/t.

    ``u_range`` restricts the points to the linear regime. With ``auto``
    the largest set of highest-U points whose line has r^2 >= 0.99 is used.
    """
    u = np.asarray(u_values, dtype=float)
    xi = np.asarray(xi_values, dtype=float)
    if u.shape != xi.shape:
        raise InvalidInputError("u_values and xi_values differ in length")
    if np.any(xi <= 0):
        raise InvalidInputError("correlation lengths must be positive")
    order = np.argsort(u)
    u, xi = u[order], xi[order]
    if u_range is not None:
        mask = (u >= u_range[0]) & (u <= u_range[1])
        u, xi = u[mask], xi[mask]
    if u.size < MIN_SWEEP_POINTS:
        raise FitError(f"need at least {MIN_SWEEP_POINTS} points in the linear regime, got {u.size}")

    if not auto:
        return _linear_root(u, 1.0 / xi)

    for start in range(0, u.size - MIN_SWEEP_POINTS + 1):
        try:
            result = _linear_root(u[start:], 1.0 / xi[start:])
        except InvalidRegimeError:
            continue
        if result.r_squared >= LINEAR_REGIME_R2:
            result.extras["points_used"] = float(u.size - start)
            return result
    raise InvalidRegimeError("no suffix of the sweep is linear with r^2 >= 0.99")


def fit_luttinger_coefficient(alpha_series: Sequence[Tuple[float, float]], n0: float) -> FitResult:
    """Least-squares A in alpha = A sqrt(U / (t n0))."""
    pairs = np.asarray(list(alpha_series), dtype=float)
    if pairs.size == 0:
        raise InvalidInputError("no (U/t, alpha) pairs supplied")
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise InvalidInputError("alpha_series must hold (U/t, alpha) pairs")
    if pairs.shape[0] < MIN_SWEEP_POINTS:
        raise FitError(f"need at least {MIN_SWEEP_POINTS} pairs, got {pairs.shape[0]}")
    if n0 <= 0:
        raise InvalidInputError(f"n0 must be positive, got {n0}")
    u, alpha = pairs[:, 0], pairs[:, 1]
    if np.any(u <= 0):
        raise InvalidInputError("U/t must be positive in every pair")

    x = np.sqrt(u / n0)
    coefficient = float(np.dot(x, alpha) / np.dot(x, x))
    residuals = alpha - coefficient * x
    dof = max(x.size - 1, 1)
    error = float(np.sqrt(np.dot(residuals, residuals) / dof / np.dot(x, x)))
    total = np.sum((alpha - alpha.mean()) ** 2)
    r_squared = 1.0 if total == 0 else float(np.clip(1 - np.dot(residuals, residuals) / total, 0.0, 1.0))

    return FitResult(
        kind=FitKind.LUTTINGER_SCALING,
        parameters={"A": coefficient},
        errors={"A": error},
        window=(float(u.min()), float(u.max())),
        r_squared=r_squared,
        extras={"residual": float(np.sqrt(np.dot(residuals, residuals)))},
    )
