"""DMRG blocks: truncated bases with phonon-number labels and site operators."""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix, diags, identity, kron

from ...chain.model import BoseHubbardModel

MULTIPLET_RTOL = 1e-8
NEGLIGIBLE_WEIGHT = 1e-14


@dataclass
class Block:
    """A block of consecutive sites in a truncated basis.

    Every basis state carries a definite phonon number (``numbers``). The
    block keeps the annihilator of each of its sites so long-range
    tunneling to any other site can be added later. ``trmat`` maps the
    enlarged parent basis onto this basis.
    """

    sites: Tuple[int, ...]
    numbers: np.ndarray
    hamiltonian: csr_matrix
    annihilators: Dict[int, csr_matrix] = field(default_factory=dict)
    trmat: Optional[np.ndarray] = None

    @property
    def length(self) -> int:
        return len(self.sites)

    @property
    def basis_size(self) -> int:
        return int(self.numbers.size)

    def sector_indices(self) -> Dict[int, np.ndarray]:
        """Basis positions grouped by phonon number."""
        return {int(n): np.flatnonzero(self.numbers == n) for n in np.unique(self.numbers)}


def empty_block() -> Block:
    """Zero-site block: one state with no phonons."""
    return Block(sites=(), numbers=np.zeros(1, dtype=np.int64), hamiltonian=csr_matrix((1, 1)))


def site_annihilator(n_max: int) -> np.ndarray:
    """Truncated a with a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)


def site_hamiltonian(model: BoseHubbardModel, site: int, n_max: int) -> csr_matrix:
    levels = np.arange(n_max + 1, dtype=float)
    energies = model.onsite_energy[site] * levels + model.onsite_interaction[site] * levels * (levels - 1)
    return diags(energies, format="csr")


def enlarge_block(model: BoseHubbardModel, block: Block, site: int, n_max: int) -> Block:
    """Add one bare site; the new basis index is block_index * d + occupation."""
    d = n_max + 1
    m = block.basis_size
    a_site = csr_matrix(site_annihilator(n_max))
    eye_d = identity(d, format="csr")
    eye_m = identity(m, format="csr")

    hamiltonian = kron(block.hamiltonian, eye_d) + kron(eye_m, site_hamiltonian(model, site, n_max))

    # sum_i t_i,site a_i over the sites already in the block
    coupling = csr_matrix((m, m))
    for i, a_i in block.annihilators.items():
        t = model.hopping[i, site]
        if t != 0:
            coupling = coupling + t * a_i
    if coupling.nnz:
        hamiltonian = hamiltonian + kron(coupling.T, a_site) + kron(coupling, a_site.T)

    annihilators = {i: kron(a_i, eye_d, format="csr") for i, a_i in block.annihilators.items()}
    annihilators[site] = kron(eye_m, a_site, format="csr")

    return Block(
        sites=block.sites + (site,),
        numbers=np.add.outer(block.numbers, np.arange(d)).ravel(),
        hamiltonian=hamiltonian.tocsr(),
        annihilators=annihilators,
    )


def _rotate(operator: csr_matrix, trmat: np.ndarray, symmetric: bool = False) -> csr_matrix:
    rotated = trmat.T @ (operator @ trmat)
    if symmetric:
        rotated = 0.5 * (rotated + rotated.T)
    return csr_matrix(rotated)


def truncate_block(enlarged: Block, density_blocks: Dict[int, np.ndarray], max_states: int) -> Tuple[Block, float]:
    """Keep the ``max_states`` heaviest reduced-density-matrix eigenstates.

    ``density_blocks`` maps a phonon number to the reduced density matrix
    restricted to that sector of ``enlarged``. A multiplet of equal weights
    at the cut is kept whole. Blocks that already fit are kept unrotated.
    Returns the new block and the discarded weight.
    """
    if enlarged.basis_size <= max_states:
        trmat = np.eye(enlarged.basis_size)
        block = Block(enlarged.sites, enlarged.numbers.copy(), enlarged.hamiltonian,
                      dict(enlarged.annihilators), trmat)
        return block, 0.0

    sectors = enlarged.sector_indices()
    candidates = []
    for number in sorted(density_blocks):
        weights, vectors = np.linalg.eigh(density_blocks[number])
        for k in range(weights.size):
            candidates.append((float(weights[k]), number, k, vectors[:, k]))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))

    total = sum(max(c[0], 0.0) for c in candidates)
    kept = candidates[:max_states]
    if kept and kept[-1][0] > NEGLIGIBLE_WEIGHT:
        edge = kept[-1][0]
        for candidate in candidates[max_states:]:
            if abs(candidate[0] - edge) > MULTIPLET_RTOL * edge:
                break
            kept.append(candidate)
    kept.sort(key=lambda c: (c[1], -c[0], c[2]))

    trmat = np.zeros((enlarged.basis_size, len(kept)))
    numbers = np.empty(len(kept), dtype=np.int64)
    for column, (_, number, _, vector) in enumerate(kept):
        trmat[sectors[number], column] = vector
        numbers[column] = number

    kept_weight = sum(max(c[0], 0.0) for c in kept)
    discarded = 0.0 if total <= 0 else min(1.0, max(0.0, 1.0 - kept_weight / total))

    block = Block(
        sites=enlarged.sites,
        numbers=numbers,
        hamiltonian=_rotate(enlarged.hamiltonian, trmat, symmetric=True),
        annihilators={i: _rotate(a_i, trmat) for i, a_i in enlarged.annihilators.items()},
        trmat=trmat,
    )
    return block, discarded
