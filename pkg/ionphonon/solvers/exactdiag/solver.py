"""Exact ground states of the Bose-Hubbard model in one phonon-number sector."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ...chain.model import BoseHubbardModel
from ...core.errors import ConvergenceError, InvalidInputError, UndefinedGapError
from ...core.solver import GroundStateResult, GroundStateSolver, Measurements
from .basis import SectorBasis, enumerate_sector, sector_dimension

logger = logging.getLogger(__name__)

DENSE_LIMIT = 2000
SPARSE_LIMIT = 20000
MAX_DIMENSION = 5_000_000
RESIDUAL_TOL = 1e-10  # relative to max(1, max |E|)
DEGENERACY_WINDOW = 1e-9


class EigenPair(NamedTuple):
    energy: float
    vector: np.ndarray


def _hops(model: BoseHubbardModel, basis: SectorBasis,
          columns: Optional[np.ndarray] = None) -> Iterator[Tuple[int, int, np.ndarray, np.ndarray, np.ndarray]]:
    """Yield (i, j, rows, cols, amplitudes) of a+_i a_j acting on basis states.

    Amplitudes exclude t_ij. ``columns`` restricts the source states.
    """
    states = basis.states if columns is None else basis.states[columns]
    source = np.arange(basis.dimension) if columns is None else columns
    for i in range(basis.n_sites):
        for j in range(basis.n_sites):
            if i == j:
                continue
            mask = (states[:, j] > 0) & (states[:, i] < basis.n_max)
            if not np.any(mask):
                continue
            moved = states[mask].copy()
            amplitude = np.sqrt((moved[:, i] + 1.0) * moved[:, j])
            moved[:, i] += 1
            moved[:, j] -= 1
            yield i, j, basis.index_of(moved), source[mask], amplitude


def diagonal_energies(model: BoseHubbardModel, basis: SectorBasis) -> np.ndarray:
    n = basis.states.astype(float)
    return n @ model.onsite_energy + (n * (n - 1)) @ model.onsite_interaction


def sector_hamiltonian(model: BoseHubbardModel, basis: SectorBasis) -> csr_matrix:
    """Sparse sector Hamiltonian in the basis order."""
    _check_basis(model, basis)
    dim = basis.dimension
    rows = [np.arange(dim)]
    cols = [np.arange(dim)]
    data = [diagonal_energies(model, basis)]
    for i, j, target, source, amplitude in _hops(model, basis):
        if model.hopping[i, j] == 0:
            continue
        rows.append(target)
        cols.append(source)
        data.append(model.hopping[i, j] * amplitude)
    matrix = coo_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
                        shape=(dim, dim))
    return matrix.tocsr()


class SectorOperator(LinearOperator):
    """Matrix-free sector Hamiltonian; transitions are regenerated on every product.

    With ``workers > 1`` the source states are split into chunks whose
    partial products are summed in chunk order.
    """

    def __init__(self, model: BoseHubbardModel, basis: SectorBasis, workers: int = 1,
                 chunk_size: int = 200_000):
        _check_basis(model, basis)
        self.model = model
        self.basis = basis
        self.workers = max(1, int(workers))
        self.diagonal = diagonal_energies(model, basis)
        dim = basis.dimension
        self.chunks = [np.arange(start, min(start + chunk_size, dim)) for start in range(0, dim, chunk_size)]
        super().__init__(dtype=np.float64, shape=(dim, dim))

    def _chunk_product(self, vector: np.ndarray, columns: np.ndarray) -> np.ndarray:
        out = np.zeros(self.basis.dimension)
        for i, j, target, source, amplitude in _hops(self.model, self.basis, columns):
            t = self.model.hopping[i, j]
            if t != 0:
                out += np.bincount(target, weights=t * amplitude * vector[source], minlength=out.size)
        return out

    def _matvec(self, vector):
        vector = np.asarray(vector, dtype=float).ravel()
        if self.workers == 1 or len(self.chunks) == 1:
            partials = [self._chunk_product(vector, columns) for columns in self.chunks]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                partials = list(pool.map(lambda columns: self._chunk_product(vector, columns), self.chunks))
        out = self.diagonal * vector
        for partial in partials:
            out += partial
        return out

    def _rmatvec(self, vector):
        return self._matvec(vector)


def _check_basis(model: BoseHubbardModel, basis: SectorBasis) -> None:
    if basis.n_sites != model.n_sites or basis.n_phonons != model.n_phonons:
        raise InvalidInputError(
            f"basis ({basis.n_sites} sites, {basis.n_phonons} phonons) does not match the model "
            f"({model.n_sites} sites, {model.n_phonons} phonons)"
        )


def _fix_sign(vectors: np.ndarray) -> np.ndarray:
    # Largest component of each eigenvector made positive
    for column in range(vectors.shape[1]):
        pivot = np.argmax(np.abs(vectors[:, column]))
        if vectors[pivot, column] < 0:
            vectors[:, column] *= -1
    return vectors


def _lowest(model: BoseHubbardModel, basis: SectorBasis, k: int, seed: int,
            workers: int) -> Tuple[np.ndarray, np.ndarray, str]:
    dim = basis.dimension
    if dim <= DENSE_LIMIT:
        energies, vectors = np.linalg.eigh(sector_hamiltonian(model, basis).toarray())
        return energies[:k], vectors[:, :k], "dense"

    if dim <= SPARSE_LIMIT:
        operator, tier = sector_hamiltonian(model, basis), "sparse"
    else:
        operator, tier = SectorOperator(model, basis, workers=workers), "matrix-free"

    v0 = np.random.default_rng(seed).standard_normal(dim)
    try:
        energies, vectors = eigsh(operator, k=k, which="SA", v0=v0, tol=0)
    except ArpackNoConvergence as exc:
        raise ConvergenceError(f"Lanczos did not converge in a {dim}-dimensional sector") from exc
    order = np.argsort(energies)
    return energies[order], vectors[:, order], tier


def _apply(model: BoseHubbardModel, basis: SectorBasis, vectors: np.ndarray) -> np.ndarray:
    if basis.dimension <= SPARSE_LIMIT:
        return sector_hamiltonian(model, basis) @ vectors
    return SectorOperator(model, basis).matmat(vectors)


def ed_ground_state(model: BoseHubbardModel, basis: SectorBasis, k: int = 1, seed: int = 0,
                    workers: int = 1) -> List[EigenPair]:
    """The ``k`` lowest eigenpairs of the sector Hamiltonian, energies ascending."""
    _check_basis(model, basis)
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    if basis.dimension < k:
        raise InvalidInputError(f"sector has {basis.dimension} states, fewer than k={k}")
    if basis.dimension > MAX_DIMENSION:
        raise InvalidInputError(f"sector dimension {basis.dimension} is too large for exact diagonalization")

    energies, vectors, tier = _lowest(model, basis, k, seed, workers)
    vectors = _fix_sign(vectors / np.linalg.norm(vectors, axis=0))

    residuals = np.linalg.norm(_apply(model, basis, vectors) - vectors * energies, axis=0)
    worst = float(residuals.max())
    if worst > RESIDUAL_TOL * max(1.0, float(np.max(np.abs(energies)))):
        raise ConvergenceError("eigenpair residual above tolerance", residual=worst)
    logger.debug("ED %s solve: dim=%d k=%d residual=%.2e", tier, basis.dimension, k, worst)

    return [EigenPair(float(e), vectors[:, n].copy()) for n, e in enumerate(energies)]


def ed_ground_manifold(model: BoseHubbardModel, basis: SectorBasis, window: Optional[float] = None,
                       seed: int = 0, workers: int = 1) -> List[EigenPair]:
    """Every eigenpair within ``window`` (default 1e-9 max(1, |E0|)) of the ground energy."""
    dim = basis.dimension
    k = min(dim, 4)
    while True:
        # ARPACK needs k < dim; the dense tier returns everything anyway
        k_solve = k if dim <= DENSE_LIMIT else min(k, dim - 1)
        pairs = ed_ground_state(model, basis, k=k_solve, seed=seed, workers=workers)
        e0 = pairs[0].energy
        limit = DEGENERACY_WINDOW * max(1.0, abs(e0)) if window is None else window
        manifold = [pair for pair in pairs if pair.energy - e0 <= limit]
        if len(manifold) < len(pairs) or k_solve >= dim - (0 if dim <= DENSE_LIMIT else 1):
            return manifold
        k = min(dim, 2 * k)


def ed_gap(model: BoseHubbardModel, basis: SectorBasis, seed: int = 0, workers: int = 1) -> float:
    """E1 - E0 inside the sector."""
    if basis.dimension < 2:
        raise UndefinedGapError("a one-state sector has no gap")
    pairs = ed_ground_state(model, basis, k=2, seed=seed, workers=workers)
    return max(0.0, pairs[1].energy - pairs[0].energy)


class ExactState:
    """Equal-weight mixture of the ground manifold in a sector basis."""

    def __init__(self, model: BoseHubbardModel, basis: SectorBasis, vectors: np.ndarray):
        self.model = model
        self.basis = basis
        self.vectors = np.atleast_2d(vectors)
        self.weights = np.full(self.vectors.shape[0], 1.0 / self.vectors.shape[0])

    @property
    def n_sites(self) -> int:
        return self.basis.n_sites

    def _probabilities(self) -> np.ndarray:
        return self.weights @ (self.vectors ** 2)

    def density(self) -> np.ndarray:
        return self._probabilities() @ self.basis.states

    def density_squared(self) -> np.ndarray:
        return self._probabilities() @ self.basis.states ** 2

    def density_correlations(self) -> np.ndarray:
        n = self.basis.states.astype(float)
        return n.T @ (self._probabilities()[:, None] * n)

    def hopping_correlations(self) -> np.ndarray:
        """Matrix of <a+_i a_j>; the diagonal is <n_i>."""
        correlations = np.diag(self.density())
        for i, j, target, source, amplitude in _hops(self.model, self.basis):
            value = 0.0
            for weight, vector in zip(self.weights, self.vectors):
                value += weight * np.dot(vector[target] * amplitude, vector[source])
            correlations[i, j] = value
        return correlations

    def measurements(self, two_point: bool = True) -> Measurements:
        if not two_point:
            return Measurements(self.density(), self.density_squared())
        return Measurements(self.density(), self.density_squared(),
                            self.hopping_correlations(), self.density_correlations())


class ExactDiagonalizationSolver(GroundStateSolver):
    """Exact diagonalization of the full sector."""

    def _validate_config(self) -> None:
        """Validate ED settings and refuse sectors that are too large."""
        workers = self.get_config_value("workers", 1)
        if workers < 1:
            raise InvalidInputError(f"workers must be >= 1, got {workers}")
        dimension = self.estimate_dimension()
        if dimension > MAX_DIMENSION:
            raise InvalidInputError(
                f"sector dimension {dimension} exceeds the exact-diagonalization limit {MAX_DIMENSION}"
            )

    def get_solver_name(self) -> str:
        """Get the name of this solver."""
        return "ed"

    def estimate_dimension(self) -> int:
        return sector_dimension(self.model.n_sites, self.model.n_phonons, self.get_n_max())

    def solve(self) -> GroundStateResult:
        """Diagonalize, measure the ground manifold, optionally compute the gap."""
        seed = int(self.get_config_value("seed", 0))
        workers = int(self.get_config_value("workers", 1))
        basis = enumerate_sector(self.model.n_sites, self.model.n_phonons, self.get_n_max())
        manifold = ed_ground_manifold(self.model, basis, seed=seed, workers=workers)

        state = ExactState(self.model, basis, np.array([pair.vector for pair in manifold]))
        result = GroundStateResult(
            solver=self.get_solver_name(),
            energy=manifold[0].energy,
            state=state,
            degenerate=len(manifold) > 1,
            metadata={"dimension": basis.dimension, "manifold_size": len(manifold)},
        )
        if result.degenerate:
            result.warnings.append(f"ground manifold has {len(manifold)} states; measured as a mixture")
            logger.info("degenerate ground manifold of size %d", len(manifold))
        if self.get_config_value("gap", False) and basis.dimension > 1:
            result.gap = ed_gap(self.model, basis, seed=seed, workers=workers)
        return result
