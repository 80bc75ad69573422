"""Finite-system DMRG for the phonon Bose-Hubbard model with long-range tunneling.

Both blocks keep the annihilator of every site they contain, so the full
t_ij matrix between system and environment enters each superblock. That
coupling is factorized by a singular value decomposition of the t_ij
submatrix, and the superblock wavefunction is stored sector by sector
(one dense matrix per system phonon number).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ...chain.model import BoseHubbardModel
from ...core.errors import ConvergenceError, InfeasibleSectorError, InvalidInputError
from ...core.solver import GroundStateResult, GroundStateSolver, Measurements
from .blocks import Block, empty_block, enlarge_block, site_annihilator, truncate_block
from .checkpoint import load_checkpoint, save_checkpoint
from .mps import MatrixProductState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DmrgConfig:
    """Settings of one DMRG run."""

    kept_states: int = 100
    max_sweeps: int = 12
    energy_tol: float = 1e-9
    n_max: Optional[int] = None
    seed: int = 0
    checkpoint_path: Optional[str] = None
    degeneracy_gap: float = 1e-6
    coupling_rank_tol: float = 1e-13
    dense_limit: int = 200

    def __post_init__(self):
        if self.kept_states < 1:
            raise InvalidInputError(f"kept_states must be >= 1, got {self.kept_states}")
        if self.max_sweeps < 1:
            raise InvalidInputError(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if self.energy_tol <= 0:
            raise InvalidInputError(f"energy_tol must be positive, got {self.energy_tol}")
        if self.n_max is not None and self.n_max < 1:
            raise InvalidInputError(f"n_max must be >= 1, got {self.n_max}")


class Superblock:
    """System x environment Hamiltonian restricted to a fixed total phonon number."""

    def __init__(self, model: BoseHubbardModel, system: Block, environment: Block, target: int,
                 rank_tol: float = 1e-13):
        self.system = system
        self.environment = environment
        self.target = target
        self.sys_index = system.sector_indices()
        self.env_index = environment.sector_indices()

        self.sectors = [(n, target - n) for n in sorted(self.sys_index) if target - n in self.env_index]
        if not self.sectors:
            raise InfeasibleSectorError(f"no superblock states carry {target} phonons")
        self.shapes = [(self.sys_index[n].size, self.env_index[e].size) for n, e in self.sectors]
        sizes = [rows * cols for rows, cols in self.shapes]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.dimension = int(self.offsets[-1])

        self.h_sys = {n: self._sector_block(system.hamiltonian, self.sys_index, n, n) for n, _ in self.sectors}
        self.h_env = {e: self._sector_block(environment.hamiltonian, self.env_index, e, e) for _, e in self.sectors}
        self.terms = self._coupling_terms(model, rank_tol)

    @staticmethod
    def _sector_block(operator, index: Dict[int, np.ndarray], row: int, col: int) -> np.ndarray:
        return operator[index[row]][:, index[col]].toarray()

    def _lowering_blocks(self, operator, index: Dict[int, np.ndarray]) -> Dict[int, np.ndarray]:
        # blocks[n] maps sector n to sector n - 1
        return {n: self._sector_block(operator, index, n - 1, n) for n in index if n - 1 in index}

    def _coupling_terms(self, model: BoseHubbardModel, rank_tol: float) -> List[Tuple[float, Dict, Dict]]:
        sys_sites = sorted(self.system.annihilators)
        env_sites = sorted(self.environment.annihilators)
        couplings = model.hopping[np.ix_(sys_sites, env_sites)]
        if not np.any(couplings):
            return []

        u, s, vt = np.linalg.svd(couplings, full_matrices=False)
        terms = []
        for k in np.flatnonzero(s > rank_tol * s[0]):
            a_k = sum(u[i, k] * self.system.annihilators[site] for i, site in enumerate(sys_sites))
            b_k = sum(vt[k, j] * self.environment.annihilators[site] for j, site in enumerate(env_sites))
            terms.append((float(s[k]), self._lowering_blocks(a_k, self.sys_index),
                          self._lowering_blocks(b_k, self.env_index)))
        return terms

    def unpack(self, vector: np.ndarray) -> Dict[int, np.ndarray]:
        """Split a flat vector into per-sector matrices keyed by system phonon number."""
        return {
            n: vector[self.offsets[k]:self.offsets[k + 1]].reshape(self.shapes[k])
            for k, (n, _) in enumerate(self.sectors)
        }

    def pack(self, blocks: Dict[int, np.ndarray]) -> np.ndarray:
        return np.concatenate([blocks[n].ravel() for n, _ in self.sectors])

    def matvec(self, vector: np.ndarray) -> np.ndarray:
        psi = self.unpack(np.asarray(vector, dtype=float).ravel())
        out = {}
        for n, e in self.sectors:
            result = self.h_sys[n] @ psi[n] + psi[n] @ self.h_env[e]
            for strength, a_low, b_low in self.terms:
                # a+ on the system side, a on the environment side
                if n - 1 in psi and n in a_low and e + 1 in b_low:
                    result += strength * (a_low[n].T @ psi[n - 1] @ b_low[e + 1].T)
                # a on the system side, a+ on the environment side
                if n + 1 in psi and n + 1 in a_low and e in b_low:
                    result += strength * (a_low[n + 1] @ psi[n + 1] @ b_low[e])
            out[n] = result
        return self.pack(out)

    def lowest(self, k: int, guess: Optional[np.ndarray], rng: np.random.Generator,
               dense_limit: int) -> Tuple[np.ndarray, np.ndarray]:
        """The k lowest eigenpairs; ``guess`` seeds the Lanczos start vector."""
        dim = self.dimension
        k = min(k, dim)
        if dim <= dense_limit or k >= dim - 1:
            matrix = np.column_stack([self.matvec(column) for column in np.eye(dim)])
            energies, vectors = np.linalg.eigh(0.5 * (matrix + matrix.T))
            return energies[:k], vectors[:, :k]

        if guess is None or np.linalg.norm(guess) < 1e-12:
            guess = rng.standard_normal(dim)
        operator = LinearOperator((dim, dim), matvec=self.matvec, dtype=np.float64)
        try:
            energies, vectors = eigsh(operator, k=k, which="SA", v0=guess, tol=0)
        except ArpackNoConvergence as exc:
            raise ConvergenceError(f"Lanczos failed on a {dim}-dimensional superblock") from exc
        order = np.argsort(energies)
        return energies[order], vectors[:, order]

    def density_blocks(self, vector: np.ndarray, side: str) -> Dict[int, np.ndarray]:
        """Reduced density matrix of one side, by sector."""
        psi = self.unpack(vector)
        if side == "system":
            return {n: psi[n] @ psi[n].T for n, _ in self.sectors}
        return {e: psi[n].T @ psi[n] for n, e in self.sectors}

    def to_matrix(self, vector: np.ndarray) -> np.ndarray:
        matrix = np.zeros((self.system.basis_size, self.environment.basis_size))
        for n, block in self.unpack(vector).items():
            matrix[np.ix_(self.sys_index[n], self.env_index[self.target - n])] = block
        return matrix

    def from_matrix(self, matrix: np.ndarray) -> np.ndarray:
        return self.pack({n: matrix[np.ix_(self.sys_index[n], self.env_index[e])] for n, e in self.sectors})

    def number_drift(self, vector: np.ndarray) -> float:
        """|<N_sys + N_env> - target| of a normalized vector."""
        psi = self.unpack(vector)
        sys_numbers = {n: self.system.numbers[self.sys_index[n]] for n, _ in self.sectors}
        env_numbers = {n: self.environment.numbers[self.env_index[e]] for n, e in self.sectors}
        mean = sum(
            np.sum(psi[n] ** 2 * (sys_numbers[n][:, None] + env_numbers[n][None, :]))
            for n, _ in self.sectors
        )
        return float(abs(mean / max(np.dot(vector, vector), 1e-300) - self.target))


class StepRecord(NamedTuple):
    sweep: int
    position: int
    direction: str
    energy: float
    truncation_weight: float
    dimension: int
    number_drift: float


class _StepOutcome(NamedTuple):
    energies: np.ndarray
    psi: np.ndarray
    new_system: Block
    new_environment: Optional[Block]
    reduced_spectrum: np.ndarray


@dataclass
class SweepRecord:
    sweep: int
    energy: float
    best_energy: float
    max_truncation_weight: float
    max_number_drift: float


class OnePoint(str, Enum):
    DENSITY = "density"
    DENSITY_SQUARED = "density_squared"


class TwoPoint(str, Enum):
    HOP = "hop"
    DENS = "dens"


@dataclass
class DmrgState:
    """Converged (or flagged) DMRG ground state with its sweep history."""

    mps: MatrixProductState
    energy: float
    n_phonons: int
    n_max: int
    converged: bool
    sweeps: int
    sweep_history: List[SweepRecord] = field(default_factory=list)
    truncation_weights: List[float] = field(default_factory=list)
    gap_estimate: Optional[float] = None
    near_degenerate: bool = False
    reduced_spectrum: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_sites(self) -> int:
        return self.mps.n_sites

    def _operators(self) -> Tuple[np.ndarray, np.ndarray]:
        a = site_annihilator(self.n_max)
        return a, np.diag(np.arange(self.n_max + 1, dtype=float))

    def density(self) -> np.ndarray:
        return self.mps.one_site(self._operators()[1])

    def density_squared(self) -> np.ndarray:
        n = self._operators()[1]
        return self.mps.one_site(n @ n)

    def hopping_correlations(self) -> np.ndarray:
        a, _ = self._operators()
        return self.mps.correlation_matrix(a.T, a)

    def density_correlations(self) -> np.ndarray:
        _, n = self._operators()
        return self.mps.correlation_matrix(n, n)

    def measurements(self, two_point: bool = True) -> Measurements:
        if not two_point:
            return Measurements(self.density(), self.density_squared())
        return Measurements(self.density(), self.density_squared(),
                            self.hopping_correlations(), self.density_correlations())


def measure_one_point(state: DmrgState, which: OnePoint) -> np.ndarray:
    """<n_j> or <n_j^2> for every site."""
    which = OnePoint(which)
    if which is OnePoint.DENSITY:
        return state.density()
    return state.density_squared()


def measure_two_point(state: DmrgState, kind: TwoPoint, i: int, j: int) -> float:
    """Raw <a+_i a_j> or <n_i n_j> for 1-based sites i and j."""
    kind = TwoPoint(kind)
    n_sites = state.n_sites
    if not (1 <= i <= n_sites and 1 <= j <= n_sites):
        raise InvalidInputError(f"sites must lie in 1..{n_sites}, got ({i}, {j})")
    a, n = state._operators()
    if kind is TwoPoint.HOP:
        return state.mps.two_site(a.T, a, i - 1, j - 1)
    return state.mps.two_site(n, n, i - 1, j - 1)


class _SweepEngine:
    """Warm-up growth from both chain ends followed by finite sweeps."""

    def __init__(self, model: BoseHubbardModel, n_phonons: int, config: DmrgConfig, n_max: int):
        self.model = model
        self.n_sites = model.n_sites
        self.n_phonons = n_phonons
        self.config = config
        self.n_max = n_max
        self.d = n_max + 1
        self.rng = np.random.default_rng(config.seed)
        self.left: Dict[int, Block] = {0: empty_block()}
        self.right: Dict[int, Block] = {0: empty_block()}
        self.p_start = 0
        self.sweeps_done = 0
        self.sweep_history: List[SweepRecord] = []
        self.steps: List[StepRecord] = []
        self._last: Optional[Tuple[int, str, _StepOutcome, Optional[np.ndarray]]] = None

    @property
    def p_min(self) -> int:
        return 1 if self.n_sites >= 4 else self.p_start

    @property
    def p_max(self) -> int:
        return self.n_sites - 3 if self.n_sites >= 4 else self.p_start

    def _step(self, system: Block, environment: Block, sys_site: int, env_site: int, target: int,
              guess_matrix: Optional[np.ndarray], grow_environment: bool, n_eigs: int = 1,
              record: Optional[Tuple[int, int, str]] = None) -> _StepOutcome:
        sys_enl = enlarge_block(self.model, system, sys_site, self.n_max)
        env_enl = enlarge_block(self.model, environment, env_site, self.n_max)
        superblock = Superblock(self.model, sys_enl, env_enl, target, self.config.coupling_rank_tol)

        guess = None
        if guess_matrix is not None and guess_matrix.shape == (sys_enl.basis_size, env_enl.basis_size):
            guess = superblock.from_matrix(guess_matrix)
        energies, vectors = superblock.lowest(n_eigs, guess, self.rng, self.config.dense_limit)
        psi = vectors[:, 0] / np.linalg.norm(vectors[:, 0])

        system_rho = superblock.density_blocks(psi, "system")
        new_system, weight = truncate_block(sys_enl, system_rho, self.config.kept_states)
        new_environment = None
        if grow_environment:
            new_environment, env_weight = truncate_block(
                env_enl, superblock.density_blocks(psi, "environment"), self.config.kept_states)
            weight = max(weight, env_weight)

        spectrum = np.sort(np.concatenate([np.linalg.eigvalsh(rho) for rho in system_rho.values()]))[::-1]
        drift = superblock.number_drift(psi)
        sweep, position, direction = record if record else (-1, sys_site, "w")
        self.steps.append(StepRecord(sweep, position, direction, float(energies[0]), weight,
                                     superblock.dimension, drift))
        logger.debug("step %s%d sweep %d: E=%.12f dim=%d trunc=%.2e",
                     direction, position, sweep, energies[0], superblock.dimension, weight)
        return _StepOutcome(energies, superblock.to_matrix(psi), new_system, new_environment, spectrum[:16])

    def warmup(self) -> None:
        """Grow blocks from both real chain ends until they cover the chain."""
        left_len = right_len = 0
        while left_len + right_len + 2 < self.n_sites:
            covered = left_len + right_len + 2
            target = self.n_phonons * covered // self.n_sites
            grow_right = (left_len + 1) + (right_len + 1) + 2 <= self.n_sites
            outcome = self._step(self.left[left_len], self.right[right_len], left_len,
                                 self.n_sites - 1 - right_len, target, None, grow_right)
            self.left[left_len + 1] = outcome.new_system
            left_len += 1
            if grow_right:
                self.right[right_len + 1] = outcome.new_environment
                right_len += 1
        self.p_start = left_len
        logger.info("warm-up done: left block %d sites, right block %d sites", left_len, right_len)

    def superblock_is_complete(self) -> bool:
        """True when the blocks at the starting bond span their full Hilbert spaces."""
        blocks = [self.left[k] for k in range(self.p_start + 1)]
        blocks += [self.right[k] for k in range(self.n_sites - self.p_start - 1)]
        return all(b.trmat is None or b.trmat.shape[0] == b.trmat.shape[1] for b in blocks)

    def sweep_path(self, sweep: int) -> List[Tuple[int, str]]:
        if self.n_sites < 4:
            return [(self.p_start, "r")]
        first = self.p_start if sweep == 0 else self.p_start + 1
        path = [(p, "r") for p in range(first, self.p_max + 1)]
        path += [(p, "l") for p in range(self.p_max, self.p_min - 1, -1)]
        path += [(p, "r") for p in range(self.p_min, self.p_start + 1)]
        return path

    def _blocks_at(self, position: int, direction: str) -> Tuple[Block, Block, int, int]:
        right_len = self.n_sites - position - 2
        if direction == "r":
            return self.left[position], self.right[right_len], position, position + 1
        return self.right[right_len], self.left[position], position + 1, position

    def _guess(self, position: int, direction: str) -> Optional[np.ndarray]:
        if self._last is None:
            return None
        last_position, last_direction, outcome, env_trmat = self._last
        if last_position == position and last_direction != direction:
            # Same superblock with system and environment exchanged
            return outcome.psi.T
        step = 1 if direction == "r" else -1
        if last_direction != direction or position != last_position + step or env_trmat is None:
            return None

        # Rotate the system index into the new block and split the old
        # environment block back into its parent block and bare site.
        sys_trmat = outcome.new_system.trmat
        new_sys = sys_trmat.shape[1]
        old_env = env_trmat.shape[1]
        parent_env = env_trmat.shape[0] // self.d
        moved = (sys_trmat.T @ outcome.psi).reshape(new_sys, old_env, self.d)
        split = env_trmat.reshape(parent_env, self.d, old_env)
        guess = np.einsum("abs,ctb->asct", moved, split)
        return guess.reshape(new_sys * self.d, parent_env * self.d)

    def finite_step(self, position: int, direction: str, sweep: int, store: bool = True,
                    n_eigs: int = 1) -> _StepOutcome:
        system, environment, sys_site, env_site = self._blocks_at(position, direction)
        guess = self._guess(position, direction)
        if not store and self._last is not None and self._last[:2] == (position, direction):
            guess = self._last[2].psi
        outcome = self._step(system, environment, sys_site, env_site, self.n_phonons, guess,
                             False, n_eigs, record=(sweep, position, direction))
        if store:
            if direction == "r":
                self.left[position + 1] = outcome.new_system
            else:
                self.right[self.n_sites - position - 1] = outcome.new_system
            self._last = (position, direction, outcome, environment.trmat)
        return outcome

    def sweep(self, sweep: int) -> SweepRecord:
        first_step = len(self.steps)
        outcome = None
        for position, direction in self.sweep_path(sweep):
            outcome = self.finite_step(position, direction, sweep)
        records = self.steps[first_step:]
        best = min(r.energy for r in records)
        if self.sweep_history:
            best = min(best, self.sweep_history[-1].best_energy)
        record = SweepRecord(
            sweep=sweep,
            energy=float(outcome.energies[0]),
            best_energy=best,
            max_truncation_weight=max(r.truncation_weight for r in records),
            max_number_drift=max(r.number_drift for r in records),
        )
        self.sweep_history.append(record)
        self.sweeps_done = sweep + 1
        logger.info("sweep %d: E=%.12f best=%.12f trunc=%.2e", sweep, record.energy,
                    record.best_energy, record.max_truncation_weight)
        return record

    def measurement_step(self) -> _StepOutcome:
        """Repeat the final bond with two eigenpairs for the gap estimate."""
        return self.finite_step(self.p_start, "r", self.sweeps_done, store=False, n_eigs=2)

    def build_mps(self, psi: np.ndarray) -> MatrixProductState:
        left = [self.left[k].trmat for k in range(1, self.p_start + 1)]
        right = [self.right[k].trmat for k in range(1, self.n_sites - self.p_start - 1)]
        return MatrixProductState.from_blocks(left, psi, right, self.d)

    def snapshot(self) -> Dict[str, Any]:
        return {
            "left": self.left,
            "right": self.right,
            "meta": {
                "n_sites": self.n_sites,
                "n_phonons": self.n_phonons,
                "n_max": self.n_max,
                "kept_states": self.config.kept_states,
                "model_hash": self.model.model_hash(),
                "p_start": self.p_start,
                "sweeps_done": self.sweeps_done,
                "sweep_energies": [r.energy for r in self.sweep_history],
                "best_energies": [r.best_energy for r in self.sweep_history],
                "rng_state": self.rng.bit_generator.state,
            },
        }

    def restore(self, checkpoint: Dict[str, Any]) -> None:
        meta = checkpoint["meta"]
        expected = (self.n_sites, self.n_phonons, self.n_max, self.model.model_hash())
        found = (meta["n_sites"], meta["n_phonons"], meta["n_max"], meta["model_hash"])
        if expected != found:
            raise InvalidInputError("checkpoint belongs to a different model or sector")
        self.left = checkpoint["left"]
        self.right = checkpoint["right"]
        self.p_start = meta["p_start"]
        self.sweeps_done = meta["sweeps_done"]
        self.rng.bit_generator.state = meta["rng_state"]
        best = np.inf
        bests = meta.get("best_energies", meta["sweep_energies"])
        for k, (energy, record_best) in enumerate(zip(meta["sweep_energies"], bests)):
            best = min(best, record_best)
            self.sweep_history.append(SweepRecord(k, energy, best, 0.0, 0.0))


def _single_site(model: BoseHubbardModel, n_phonons: int, n_max: int) -> Tuple[float, DmrgState]:
    tensor = np.zeros((1, n_max + 1, 1))
    tensor[0, n_phonons, 0] = 1.0
    energy = model.onsite_energy[0] * n_phonons + model.onsite_interaction[0] * n_phonons * (n_phonons - 1)
    state = DmrgState(MatrixProductState([tensor]), float(energy), n_phonons, n_max, True, 0)
    return float(energy), state


def dmrg_ground_state(model: BoseHubbardModel, n_phonons: int, config: DmrgConfig,
                      resume_from: Optional[str] = None) -> Tuple[float, DmrgState]:
    """Lowest energy in the ``n_phonons`` sector and the state that attains it."""
    n_max = config.n_max or model.n_max
    if n_phonons < 0 or n_phonons > model.n_sites * n_max:
        raise InfeasibleSectorError(
            f"{n_phonons} phonons do not fit on {model.n_sites} sites with n_max={n_max}"
        )
    if model.n_sites == 1:
        return _single_site(model, n_phonons, n_max)

    engine = _SweepEngine(model, n_phonons, config, n_max)
    if resume_from:
        engine.restore(load_checkpoint(resume_from))
        logger.info("resumed from %s after %d sweeps", resume_from, engine.sweeps_done)
    else:
        engine.warmup()

    converged = False
    previous = engine.sweep_history[-1].energy if engine.sweep_history else None
    while not converged and engine.sweeps_done < config.max_sweeps:
        record = engine.sweep(engine.sweeps_done)
        if model.n_sites < 4 and engine.superblock_is_complete():
            converged = True
        elif previous is not None and abs(record.energy - previous) < config.energy_tol:
            converged = True
        previous = record.energy
        if config.checkpoint_path:
            save_checkpoint(config.checkpoint_path, engine.snapshot())

    if not converged:
        logger.warning("DMRG stopped after %d sweeps without reaching energy_tol=%.1e",
                       engine.sweeps_done, config.energy_tol)

    final = engine.measurement_step()
    energy = float(final.energies[0])
    gap = float(final.energies[1] - final.energies[0]) if final.energies.size > 1 else None
    near_degenerate = gap is not None and gap < config.degeneracy_gap
    if near_degenerate:
        logger.warning("near-degenerate ground state (gap estimate %.2e); symmetry-broken "
                       "profiles are possible", gap)

    state = DmrgState(
        mps=engine.build_mps(final.psi),
        energy=energy,
        n_phonons=n_phonons,
        n_max=n_max,
        converged=converged,
        sweeps=engine.sweeps_done,
        sweep_history=list(engine.sweep_history),
        truncation_weights=[r.truncation_weight for r in engine.steps],
        gap_estimate=gap,
        near_degenerate=near_degenerate,
        reduced_spectrum=final.reduced_spectrum,
    )
    return energy, state


class DmrgSolver(GroundStateSolver):
    """Phonon-number conserving finite-system DMRG."""

    def _validate_config(self) -> None:
        """Build the DmrgConfig; invalid settings raise here."""
        self.dmrg_config = DmrgConfig(
            kept_states=int(self.get_config_value("kept_states", 100)),
            max_sweeps=int(self.get_config_value("max_sweeps", 12)),
            energy_tol=float(self.get_config_value("energy_tol", 1e-9)),
            n_max=self.get_n_max(),
            seed=int(self.get_config_value("seed", 0)),
            checkpoint_path=self.get_config_value("checkpoint"),
        )

    def get_solver_name(self) -> str:
        """Get the name of this solver."""
        return "dmrg"

    def solve(self) -> GroundStateResult:
        """Run DMRG and wrap the state with its convergence flags."""
        energy, state = dmrg_ground_state(self.model, self.model.n_phonons, self.dmrg_config,
                                          resume_from=self.get_config_value("resume_from"))
        result = GroundStateResult(
            solver=self.get_solver_name(),
            energy=energy,
            state=state,
            converged=state.converged,
            degenerate=state.near_degenerate,
            gap=state.gap_estimate if self.get_config_value("gap", False) else None,
            metadata={
                "sweeps": state.sweeps,
                "kept_states": self.dmrg_config.kept_states,
                "max_truncation_weight": max(state.truncation_weights, default=0.0),
                "gap_estimate": state.gap_estimate,
                "reduced_spectrum": state.reduced_spectrum[:4].tolist(),
            },
        )
        if not state.converged:
            result.warnings.append(f"not converged after {state.sweeps} sweeps")
        if state.near_degenerate:
            result.warnings.append(f"near-degenerate ground state (gap estimate {state.gap_estimate:.2e})")
        return result
