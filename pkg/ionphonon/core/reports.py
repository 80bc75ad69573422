"""Report files written by a run: per-point JSON and CSV, plus a sweep summary."""

import csv
import json
import logging
import threading
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from .errors import ConfigError

logger = logging.getLogger(__name__)

SUMMARY_SCHEMA_VERSION = 1
SUMMARY_COLUMNS = [
    "index",
    "parameter",
    "value",
    "u_over_t",
    "even_ratio",
    "solver",
    "energy",
    "energy_ed",
    "energy_dmrg",
    "energy_discrepancy",
    "gap",
    "tonks_O",
    "attractive_O",
    "alpha",
    "alpha_error",
    "alpha_r2",
    "xi",
    "xi_error",
    "xi_r2",
    "alpha_nn",
    "xi_nn",
    "spin_alpha",
    "energy_physical",
    "converged",
    "near_degenerate",
    "warnings",
]


class ReportStore:
    """File-system store for the reports of one run directory."""

    def __init__(self, directory: str, significant_digits: int = 12):
        """Create the directory if needed."""
        self.directory = Path(directory)
        self.digits = significant_digits
        self._lock = threading.Lock()
        self._rows: List[Dict[str, Any]] = []
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            marker = self.directory / ".write_check"
            marker.write_text("")
            marker.unlink()
        except OSError as exc:
            raise ConfigError("output.directory", f"cannot write to {self.directory}: {exc}") from exc

    def format_number(self, value: Any) -> str:
        """Render a cell: numbers with the configured significant digits."""
        if value is None:
            return ""
        if isinstance(value, (bool, np.bool_)):
            return "true" if value else "false"
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            return f"{float(value):.{self.digits}g}"
        return str(value)

    def _jsonable(self, value: Any) -> Any:
        if isinstance(value, dict):
            return {str(k): self._jsonable(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [self._jsonable(v) for v in value]
        if isinstance(value, np.ndarray):
            return [self._jsonable(v) for v in value.tolist()]
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
        if isinstance(value, (int, np.integer)):
            return int(value)
        if isinstance(value, (float, np.floating)):
            value = float(value)
            return value if not np.isfinite(value) else float(f"{value:.{self.digits}g}")
        return value

    def write_json(self, name: str, data: Dict[str, Any]) -> Path:
        path = self.directory / name
        with open(path, "w") as f:
            json.dump(self._jsonable(data), f, indent=2, sort_keys=True)
        return path

    def write_matrix(self, name: str, matrix: np.ndarray) -> Path:
        path = self.directory / name
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow([f"j{j + 1}" for j in range(matrix.shape[1])])
            for row in np.asarray(matrix):
                writer.writerow([self.format_number(float(v)) for v in row])
        return path

    def write_run_files(self, config: Dict[str, Any], manifest: Dict[str, Any]) -> None:
        """Embed the resolved configuration and the run manifest."""
        self.write_json("config.json", config)
        self.write_json("run.json", dict(manifest, summary_schema=SUMMARY_SCHEMA_VERSION,
                                         summary_columns=SUMMARY_COLUMNS))

    def write_point(self, index: int, scalars: Dict[str, Any],
                    matrices: Optional[Dict[str, Optional[np.ndarray]]] = None) -> Path:
        """Write point_<k>.json and one <name>_<k>.csv per matrix."""
        written = []
        for name, matrix in (matrices or {}).items():
            if matrix is not None:
                written.append(self.write_matrix(f"{name}_{index}.csv", matrix).name)
        path = self.write_json(f"point_{index}.json", dict(scalars, index=index, matrices=written))
        logger.debug("wrote %s", path)
        return path

    def append_summary(self, row: Dict[str, Any]) -> None:
        """Add one summary row; the file is rewritten in sweep order each time."""
        unknown = set(row) - set(SUMMARY_COLUMNS)
        if unknown:
            raise ValueError(f"unknown summary columns: {sorted(unknown)}")
        with self._lock:
            self._rows.append(dict(row))
            self._write_summary()

    def write_table(self, name: str, columns: List[str], rows: List[Dict[str, Any]]) -> Path:
        """Comma-separated table with a header row; missing cells stay empty."""
        path = self.directory / name
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([self.format_number(row.get(column)) for column in columns])
        return path

    def _write_summary(self) -> Path:
        rows = sorted(self._rows, key=lambda r: r["index"])
        return self.write_table("summary.csv", SUMMARY_COLUMNS, rows)

    def finalize_summary(self) -> Path:
        with self._lock:
            return self._write_summary()
