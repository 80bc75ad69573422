"""Sweep driver: geometry, model, solver, observables and fits for every sweep point."""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .. import __version__
from ..analysis.fitting import (
    FitKind,
    compare_decay_models,
    decaying_window,
    default_window,
    extrapolate_critical_point,
    fit_exponential,
    fit_luttinger_coefficient,
    fit_power_law,
)
from ..analysis.observables import (
    ObservableReport,
    build_report,
    correlation_profile,
    spin_correlator,
    spin_magnetization,
)
from ..chain.geometry import (
    ChainGeometry,
    amu_to_kg,
    axial_frequency_for_spacing,
    beta_x_for,
    build_geometry,
    coulomb_length,
    hopping_scale,
)
from ..chain.model import BoseHubbardModel, SitePattern, apply_site_pattern, build_model
from ..core.config import Config
from ..core.errors import FitError, InvalidInputError
from ..core.reports import SUMMARY_SCHEMA_VERSION, ReportStore
from ..solvers import create_solver

logger = logging.getLogger(__name__)

# config fit name -> (matrix, fit kind, summary column)
POINT_FITS = {
    "power_law": ("caa", FitKind.POWER_LAW, "alpha"),
    "exponential": ("caa", FitKind.EXPONENTIAL, "xi"),
    "density_power_law": ("cnn", FitKind.POWER_LAW, "alpha_nn"),
    "density_exponential": ("cnn", FitKind.EXPONENTIAL, "xi_nn"),
}


@dataclass
class PointOutcome:
    """Everything one sweep point contributes to the report directory."""

    index: int
    row: Dict[str, Any]
    scalars: Dict[str, Any]
    matrices: Dict[str, Optional[np.ndarray]]


@dataclass
class RunOutcome:
    """Result of a whole sweep."""

    directory: str
    rows: List[Dict[str, Any]]
    sweep_fits: Dict[str, Any]
    warnings: List[str] = field(default_factory=list)


def interactions_for(config: Config, value: float) -> Tuple[float, Optional[float]]:
    """(U_odd, U_even) of a sweep point; U_even is None for the uniform pattern."""
    if config.get("model.sweep_parameter") == "even_ratio":
        u_odd, ratio = float(config.get("model.u_over_t")), value
    else:
        u_odd, ratio = value, float(config.get("model.even_ratio"))
    if config.get("model.pattern") == SitePattern.UNIFORM.value:
        return u_odd, None
    return u_odd, ratio * u_odd


def build_point_model(config: Config, value: float,
                      geometry: Optional[ChainGeometry] = None) -> BoseHubbardModel:
    """Model of one sweep point; the geometry is shared by the whole sweep."""
    if geometry is None:
        geometry = build_geometry(config.get_trap_config(), float(config.get("trap.tolerance")))
    u_odd, u_even = interactions_for(config, value)
    model = build_model(
        geometry,
        u_over_t=u_odd,
        n_phonons=config.get_n_phonons(),
        n_max=config.get_n_max(),
        cutoff=config.get("model.cutoff"),
        flat_onsite=bool(config.get("model.flat_onsite")),
    )
    return apply_site_pattern(model, config.get("model.pattern"), u_odd, u_even)


def _window(config: Config, kind: FitKind, n_sites: int) -> Tuple[float, float]:
    key = "analysis.power_window" if kind is FitKind.POWER_LAW else "analysis.exp_window"
    window = config.get(key)
    return tuple(window) if window else default_window(kind, n_sites)


def _fit(kind: FitKind, separations: np.ndarray, values: np.ndarray, window):
    fitter = fit_power_law if kind is FitKind.POWER_LAW else fit_exponential
    return fitter(separations, values, window)


def point_fits(config: Config, report: ObservableReport,
               warnings: List[str]) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """Decay fits of one point: summary columns and the full fit records."""
    i0 = config.get_reference_site()
    side = config.get("observables.correlation_side")
    requested = config.get("analysis.fits")
    columns: Dict[str, Any] = {}
    records: Dict[str, Any] = {}

    for name, (matrix_name, kind, column) in POINT_FITS.items():
        if name not in requested:
            continue
        matrix = getattr(report, matrix_name)
        if matrix is None:
            continue
        r, values = correlation_profile(matrix, i0, side)
        window = _window(config, kind, report.n_sites)
        if kind is FitKind.EXPONENTIAL:
            window = decaying_window(r, values, window)
        try:
            result = _fit(kind, r, values, window)
        except FitError as exc:
            warnings.append(f"{name} fit skipped: {exc}")
            continue
        records[name] = result.to_dict()
        parameter = "alpha" if kind is FitKind.POWER_LAW else "xi"
        columns[column] = result.value(parameter)
        if column in ("alpha", "xi"):
            columns[f"{column}_error"] = result.errors[parameter]
            columns[f"{column}_r2"] = result.r_squared

    if report.caa is not None:
        r, values = correlation_profile(report.caa, i0, side)
        try:
            comparison = compare_decay_models(r, values, _window(config, FitKind.POWER_LAW, report.n_sites))
        except InvalidInputError as exc:
            logger.debug("decay comparison skipped: %s", exc)
        else:
            records["decay_comparison"] = {
                name: (fit.to_dict() if hasattr(fit, "to_dict") else fit) for name, fit in comparison.items()
            }

    if "spin_power_law" in requested or config.get("observables.spin_map"):
        correlator = spin_correlator(report, i0)
        records["spin_magnetization"] = spin_magnetization(report)
        if "spin_power_law" in requested:
            r, values = correlation_profile(correlator, i0, side)
            try:
                result = fit_power_law(r, values, _window(config, FitKind.POWER_LAW, report.n_sites))
            except FitError as exc:
                warnings.append(f"spin_power_law fit skipped: {exc}")
            else:
                records["spin_power_law"] = result.to_dict()
                columns["spin_alpha"] = result.value("alpha")
    return columns, records


def solve_point(config_data: Dict[str, Any], index: int, value: float) -> PointOutcome:
    """Solve and analyse one sweep point; runs in a worker process."""
    config = Config.from_dict(config_data)
    model = build_point_model(config, value)
    mode = config.get("solver.mode")
    settings = config.get_solver_settings()
    settings["workers"] = 1
    if settings.get("checkpoint"):
        path = Path(settings["checkpoint"])
        settings["checkpoint"] = str(path.with_name(f"{path.stem}_{index}{path.suffix}"))

    results = {}
    for name in (("ed", "dmrg") if mode == "both" else (mode,)):
        logger.info("point %d (%s=%g): solving with %s", index, config.get("model.sweep_parameter"), value, name)
        results[name] = create_solver(name, model, settings).solve()
    primary = results.get("dmrg") or results["ed"]

    warnings: List[str] = []
    for result in results.values():
        warnings.extend(f"{result.solver}: {w}" for w in result.warnings)

    report = build_report(primary.measure(two_point=True),
                          metadata={"site_pattern": model.site_pattern.value})
    columns, fits = point_fits(config, report, warnings)

    u_odd, u_even = interactions_for(config, value)
    gap = None
    if config.get("solver.gap"):
        gap = results["ed"].gap if "ed" in results else primary.gap
    row: Dict[str, Any] = {
        "index": index,
        "parameter": config.get("model.sweep_parameter"),
        "value": value,
        "u_over_t": u_odd,
        "even_ratio": None if u_even is None else (
            value if config.get("model.sweep_parameter") == "even_ratio" else config.get("model.even_ratio")
        ),
        "solver": mode,
        "energy": primary.energy,
        "energy_ed": results["ed"].energy if "ed" in results else None,
        "energy_dmrg": results["dmrg"].energy if "dmrg" in results else None,
        "gap": gap,
        "tonks_O": report.tonks_O,
        "attractive_O": report.attractive_O,
        "converged": all(result.converged for result in results.values()),
        "near_degenerate": any(result.degenerate for result in results.values()),
        "warnings": "; ".join(warnings),
        **columns,
    }
    if len(results) == 2:
        row["energy_discrepancy"] = abs(results["ed"].energy - results["dmrg"].energy)
    if config.get("units.enabled"):
        scale = hopping_scale(float(config.get("trap.beta_x")), float(config.get("trap.radial_frequency")))
        row["energy_physical"] = primary.energy * scale.value

    scalars = {
        "summary": row,
        "model_hash": model.model_hash(),
        "onsite_interaction": model.onsite_interaction,
        "density": report.density,
        "fluctuations": report.fluctuations,
        "density_squared": report.density_squared,
        "spin_correlation": report.spin_corr,
        "fits": fits,
        "solvers": {name: result.metadata for name, result in results.items()},
        **report.scalars(),
    }
    return PointOutcome(index, row, scalars, {"caa": report.caa, "cnn": report.cnn})


def physical_units(config: Config, geometry: ChainGeometry) -> Dict[str, Any]:
    """Length and frequency scales of the chain for the run manifest."""
    beta_x = float(config.get("trap.beta_x"))
    radial = float(config.get("trap.radial_frequency"))
    units: Dict[str, Any] = {"t": hopping_scale(beta_x, radial).value}
    d0 = config.get("trap.spacing_d0")
    if config.get("trap.kind") != "paul":
        if d0 is not None:
            units.update(spacing_d0=d0, positions_m=geometry.scaled_positions(float(d0)))
        return units

    mass_amu = config.get("units.ion_mass_amu")
    if mass_amu is None:
        return units
    mass = amu_to_kg(float(mass_amu))
    axial = config.get("trap.axial_frequency")
    if d0 is not None:
        axial = axial_frequency_for_spacing(mass, float(d0), geometry.min_spacing)
    elif axial is not None:
        d0 = coulomb_length(mass, float(axial)) * geometry.min_spacing
    if d0 is not None:
        units.update(axial_frequency=axial, spacing_d0=d0, beta_x_physical=beta_x_for(mass, radial, float(d0)),
                     positions_m=geometry.scaled_positions(float(d0) / geometry.min_spacing))
    return units


def sweep_fits(config: Config, rows: List[Dict[str, Any]], warnings: List[str]) -> Dict[str, Any]:
    """Luttinger coefficient and critical-point extrapolations across the sweep."""
    requested = config.get("analysis.fits")
    fits: Dict[str, Any] = {}
    if config.get("model.sweep_parameter") != "u_over_t":
        return fits

    if "luttinger" in requested:
        pairs = [(row["u_over_t"], row["alpha"]) for row in rows if row.get("alpha") is not None]
        n0 = config.get_n_phonons() / config.get_n_ions()
        try:
            fits["luttinger"] = fit_luttinger_coefficient(pairs, n0).to_dict()
        except (FitError, InvalidInputError) as exc:
            fits["luttinger"] = {"error": str(exc)}
            warnings.append(f"luttinger fit skipped: {exc}")

    if "critical_point" in requested:
        u_range = config.get("analysis.critical_range")
        for column in ("xi", "xi_nn"):
            points = [(row["u_over_t"], row[column]) for row in rows if row.get(column) is not None]
            name = f"critical_point_{column}"
            try:
                u, xi = zip(*points) if points else ((), ())
                fits[name] = extrapolate_critical_point(
                    u, xi, u_range=tuple(u_range) if u_range else None,
                    auto=bool(config.get("analysis.critical_auto")),
                ).to_dict()
            except (FitError, InvalidInputError) as exc:
                fits[name] = {"error": str(exc)}
                warnings.append(f"{name} skipped: {exc}")
    return fits


def run(config: Config, output_directory: Optional[str] = None, workers: Optional[int] = None) -> RunOutcome:
    """Execute every sweep point and write the report directory.

    Points run in up to ``workers`` processes; the summary is written in
    sweep order whatever the completion order. The first failing point is
    re-raised once the others have finished.
    """
    if output_directory:
        config.set("output.directory", output_directory)
    if workers:
        config.set("run.workers", workers)
    config.validate()

    store = ReportStore(config.get_output_directory(), int(config.get("output.significant_digits")))
    geometry = build_geometry(config.get_trap_config(), float(config.get("trap.tolerance")))
    resolved = config.to_dict()
    store.write_run_files(resolved, {
        "package_version": __version__,
        "summary_schema": SUMMARY_SCHEMA_VERSION,
        "config": resolved,
        "positions": geometry.positions,
        "min_spacing": geometry.min_spacing,
        "units": physical_units(config, geometry),
    })

    values = config.get_sweep_values()
    outcomes: List[PointOutcome] = []
    failures: List[Tuple[int, Exception]] = []

    def record(outcome: PointOutcome) -> None:
        store.write_point(outcome.index, outcome.scalars, outcome.matrices)
        store.append_summary(outcome.row)
        outcomes.append(outcome)

    if config.get_workers() > 1 and len(values) > 1:
        with ProcessPoolExecutor(max_workers=config.get_workers()) as pool:
            futures = {pool.submit(solve_point, resolved, k, v): k for k, v in enumerate(values)}
            for future in as_completed(futures):
                try:
                    record(future.result())
                except Exception as exc:
                    logger.error("point %d failed: %s", futures[future], exc)
                    failures.append((futures[future], exc))
    else:
        for k, value in enumerate(values):
            try:
                record(solve_point(resolved, k, value))
            except Exception as exc:
                logger.error("point %d failed: %s", k, exc)
                failures.append((k, exc))

    store.finalize_summary()
    if failures:
        raise min(failures, key=lambda item: item[0])[1]

    rows = [outcome.row for outcome in sorted(outcomes, key=lambda o: o.index)]
    warnings = [f"point {row['index']}: {row['warnings']}" for row in rows if row["warnings"]]
    fits = sweep_fits(config, rows, warnings)
    if fits:
        store.write_json("sweep_fits.json", fits)
    return RunOutcome(str(store.directory), rows, fits, warnings)
