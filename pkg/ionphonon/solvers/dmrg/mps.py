"""Matrix-product form of a DMRG ground state and its expectation values."""

from typing import List, Sequence

import numpy as np


def _transfer(env: np.ndarray, bra: np.ndarray, ket: np.ndarray) -> np.ndarray:
    # env[a, b] bra[a, s, c] ket[b, s, d] -> [c, d]
    return np.tensordot(bra, np.tensordot(env, ket, axes=(1, 0)), axes=([0, 1], [0, 1]))


def _with_operator(tensor: np.ndarray, operator: np.ndarray) -> np.ndarray:
    return np.einsum("st,btd->bsd", operator, tensor)


class MatrixProductState:
    """Open-boundary MPS with real tensors of shape (left bond, d, right bond)."""

    def __init__(self, tensors: Sequence[np.ndarray]):
        self.tensors: List[np.ndarray] = [np.asarray(t, dtype=float) for t in tensors]
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for left, right in zip(self.tensors, self.tensors[1:]):
            if left.shape[2] != right.shape[0]:
                raise ValueError("bond dimensions do not match")
        self._left = self._left_environments()
        self._right = self._right_environments()
        self.norm_squared = float(self._left[-1][0, 0])

    @classmethod
    def from_blocks(cls, left_trmats: Sequence[np.ndarray], center: np.ndarray,
                    right_trmats: Sequence[np.ndarray], d: int) -> "MatrixProductState":
        """Assemble from block transformations and a two-site wavefunction.

        ``left_trmats[k]`` built the left block of k+1 sites; ``right_trmats[k]``
        built the right block of k+1 sites. ``center`` is indexed by
        (left block x site, right block x site).
        """
        tensors = []
        bond = 1
        for trmat in left_trmats:
            tensors.append(trmat.reshape(bond, d, trmat.shape[1]))
            bond = trmat.shape[1]

        right_bond = center.shape[1] // d
        theta = center.reshape(bond, d, right_bond, d).transpose(0, 1, 3, 2).reshape(bond * d, d * right_bond)
        u, s, vt = np.linalg.svd(theta, full_matrices=False)
        tensors.append(u.reshape(bond, d, s.size))
        tensors.append((s[:, None] * vt).reshape(s.size, d, right_bond))

        inner = right_bond
        for trmat in reversed(right_trmats):
            outer = trmat.shape[0] // d
            if trmat.shape[1] != inner:
                raise ValueError("right block dimensions do not chain")
            tensors.append(trmat.reshape(outer, d, inner).transpose(2, 1, 0))
            inner = outer
        return cls(tensors)

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def bond_dimensions(self) -> List[int]:
        return [t.shape[2] for t in self.tensors[:-1]]

    def _left_environments(self) -> List[np.ndarray]:
        envs = [np.ones((1, 1))]
        for tensor in self.tensors:
            envs.append(_transfer(envs[-1], tensor, tensor))
        return envs

    def _right_environments(self) -> List[np.ndarray]:
        envs = [np.ones((1, 1))]
        for tensor in reversed(self.tensors):
            flipped = tensor.transpose(2, 1, 0)
            envs.append(_transfer(envs[-1], flipped, flipped))
        return envs[::-1]

    def one_site(self, operator: np.ndarray) -> np.ndarray:
        """<O_k> for every site k."""
        values = np.empty(self.n_sites)
        for k, tensor in enumerate(self.tensors):
            closed = _transfer(self._left[k], tensor, _with_operator(tensor, operator))
            values[k] = np.sum(closed * self._right[k + 1])
        return values / self.norm_squared

    def _ordered_pairs(self, first: np.ndarray, second: np.ndarray) -> np.ndarray:
        # result[k, l] = <first_k second_l> for k < l
        n = self.n_sites
        result = np.zeros((n, n))
        for k in range(n - 1):
            tensor = self.tensors[k]
            env = _transfer(self._left[k], tensor, _with_operator(tensor, first))
            for l in range(k + 1, n):
                target = self.tensors[l]
                closed = _transfer(env, target, _with_operator(target, second))
                result[k, l] = np.sum(closed * self._right[l + 1])
                env = _transfer(env, target, target)
        return result / self.norm_squared

    def correlation_matrix(self, first: np.ndarray, second: np.ndarray) -> np.ndarray:
        """Matrix of <first_i second_j>; operators on distinct sites commute."""
        upper = self._ordered_pairs(first, second)
        lower = self._ordered_pairs(second, first).T
        return upper + lower + np.diag(self.one_site(first @ second))

    def two_site(self, first: np.ndarray, second: np.ndarray, i: int, j: int) -> float:
        """<first_i second_j> for 0-based sites."""
        if i == j:
            return float(self.one_site(first @ second)[i])
        if i > j:
            first, second, i, j = second, first, j, i
        env = _transfer(self._left[i], self.tensors[i], _with_operator(self.tensors[i], first))
        for l in range(i + 1, j):
            env = _transfer(env, self.tensors[l], self.tensors[l])
        closed = _transfer(env, self.tensors[j], _with_operator(self.tensors[j], second))
        return float(np.sum(closed * self._right[j + 1])) / self.norm_squared
