"""Phonon-number conserving DMRG."""

from .engine import (
    DmrgConfig,
    DmrgSolver,
    DmrgState,
    OnePoint,
    TwoPoint,
    dmrg_ground_state,
    measure_one_point,
    measure_two_point,
)

__all__ = [
    "DmrgConfig",
    "DmrgSolver",
    "DmrgState",
    "OnePoint",
    "TwoPoint",
    "dmrg_ground_state",
    "measure_one_point",
    "measure_two_point",
]
