"""Cross-check of DMRG against exact diagonalization on small chains."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from ..analysis.observables import build_report
from ..core.config import Config
from ..core.errors import InvalidInputError, ZeroDensityError
from ..core.reports import ReportStore
from ..solvers import create_solver
from ..solvers.exactdiag.basis import sector_dimension
from .run import build_point_model

logger = logging.getLogger(__name__)

MAX_COMPARE_SITES = 6
COMPARE_COLUMNS = [
    "index",
    "value",
    "dimension",
    "energy_ed",
    "energy_dmrg",
    "energy",
    "density",
    "cnn",
    "caa",
    "gap_ed",
]


@dataclass
class ComparisonTable:
    """Per-point maximum absolute discrepancies between the two solvers."""

    rows: List[Dict[str, Any]]
    path: Optional[str] = None

    def worst(self, column: str) -> float:
        values = [row[column] for row in self.rows if row.get(column) is not None]
        return max(values, default=0.0)


def _max_difference(first: Optional[np.ndarray], second: Optional[np.ndarray]) -> Optional[float]:
    if first is None or second is None:
        return None
    return float(np.max(np.abs(first - second)))


def compare_solvers(config: Config, output_directory: Optional[str] = None) -> ComparisonTable:
    """Solve every sweep point with both solvers and tabulate the discrepancies."""
    if output_directory:
        config.set("output.directory", output_directory)
    config.validate()

    n_ions, n_phonons, n_max = config.get_n_ions(), config.get_n_phonons(), config.get_n_max()
    dimension = sector_dimension(n_ions, n_phonons, n_max)
    if n_ions > MAX_COMPARE_SITES:
        raise InvalidInputError(
            f"compare needs N <= {MAX_COMPARE_SITES}; N={n_ions} has sector dimension {dimension}"
        )

    settings = config.get_solver_settings()
    rows = []
    for index, value in enumerate(config.get_sweep_values()):
        model = build_point_model(config, value)
        ed = create_solver("ed", model, dict(settings, gap=dimension > 1)).solve()
        dmrg = create_solver("dmrg", model, dict(settings, gap=False)).solve()

        metadata = {"site_pattern": model.site_pattern.value}
        reports = []
        for result in (ed, dmrg):
            try:
                reports.append(build_report(result.measure(), metadata))
            except ZeroDensityError:
                reports.append(build_report(result.measure(), metadata, rescale=False))
        ed_report, dmrg_report = reports

        rows.append({
            "index": index,
            "value": value,
            "dimension": dimension,
            "energy_ed": ed.energy,
            "energy_dmrg": dmrg.energy,
            "energy": abs(ed.energy - dmrg.energy),
            "density": _max_difference(ed_report.density, dmrg_report.density),
            "cnn": _max_difference(ed_report.cnn, dmrg_report.cnn),
            "caa": _max_difference(ed_report.caa, dmrg_report.caa),
            "gap_ed": ed.gap,
        })
        logger.info("point %d: |dE| = %.3e", index, rows[-1]["energy"])

    store = ReportStore(config.get_output_directory(), int(config.get("output.significant_digits")))
    path = store.write_table("compare.csv", COMPARE_COLUMNS, rows)
    return ComparisonTable(rows, str(path))
