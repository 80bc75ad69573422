"""Ground-state solvers."""

from typing import Any, Dict, Optional

from ..chain.model import BoseHubbardModel
from ..core.errors import InvalidInputError
from ..core.solver import GroundStateSolver
from .dmrg import DmrgSolver
from .exactdiag.solver import ExactDiagonalizationSolver

SOLVERS = {
    "ed": ExactDiagonalizationSolver,
    "dmrg": DmrgSolver,
}


def create_solver(name: str, model: BoseHubbardModel,
                  config: Optional[Dict[str, Any]] = None) -> GroundStateSolver:
    """Instantiate the solver registered under ``name``."""
    try:
        solver_class = SOLVERS[name]
    except KeyError as exc:
        raise InvalidInputError(f"unknown solver {name!r}; expected one of {', '.join(SOLVERS)}") from exc
    return solver_class(model, config)
