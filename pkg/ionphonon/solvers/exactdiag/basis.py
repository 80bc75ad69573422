"""Occupation-number basis of a fixed phonon-number sector."""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from ...core.errors import EmptySectorError, InvalidInputError


@lru_cache(maxsize=64)
def _composition_counts(n_sites: int, n_phonons: int, n_max: int) -> Tuple[Tuple[int, ...], ...]:
    # counts[k][r]: ways to put r phonons on k sites with at most n_max each
    counts = [[0] * (n_phonons + 1) for _ in range(n_sites + 1)]
    counts[0][0] = 1
    for k in range(1, n_sites + 1):
        for r in range(n_phonons + 1):
            counts[k][r] = sum(counts[k - 1][r - v] for v in range(min(n_max, r) + 1))
    return tuple(tuple(row) for row in counts)


def sector_dimension(n_sites: int, n_phonons: int, n_max: int) -> int:
    """Number of capped compositions of ``n_phonons`` into ``n_sites`` parts."""
    _check_arguments(n_sites, n_phonons, n_max)
    if n_phonons > n_sites * n_max:
        return 0
    return _composition_counts(n_sites, n_phonons, n_max)[n_sites][n_phonons]


def _check_arguments(n_sites: int, n_phonons: int, n_max: int) -> None:
    for name, value in (("n_sites", n_sites), ("n_phonons", n_phonons), ("n_max", n_max)):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 0:
            raise InvalidInputError(f"{name} must be a nonnegative integer, got {value!r}")


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """States ordered lexicographically with the first site most significant, descending.

    The position of any occupation vector is computed directly from the
    composition counts, so lookups need neither a dictionary nor a sort.
    """

    n_sites: int
    n_phonons: int
    n_max: int
    states: np.ndarray
    _rank_table: np.ndarray = field(repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return int(self.states.shape[0])

    def index_of(self, occupations: np.ndarray) -> np.ndarray:
        """Ordinals of one occupation vector or of a stack of them."""
        occupations = np.asarray(occupations, dtype=np.int64)
        single = occupations.ndim == 1
        occupations = np.atleast_2d(occupations)
        if occupations.shape[1] != self.n_sites:
            raise InvalidInputError("occupation vectors have the wrong length")
        if (np.any(occupations < 0) or np.any(occupations > self.n_max)
                or np.any(occupations.sum(axis=1) != self.n_phonons)):
            raise InvalidInputError("occupation vector lies outside the sector")
        remaining = self.n_phonons - np.cumsum(occupations, axis=1) + occupations
        sites = np.arange(self.n_sites)
        ranks = self._rank_table[sites, remaining, occupations].sum(axis=1)
        return ranks[0] if single else ranks

    def index(self, occupation: Sequence[int]) -> int:
        return int(self.index_of(np.asarray(occupation)))


def _rank_table(n_sites: int, n_phonons: int, n_max: int) -> np.ndarray:
    # table[i, rem, v]: states that precede every state with value v at site i
    # given rem phonons left for sites i..N-1
    counts = _composition_counts(n_sites, n_phonons, n_max)
    table = np.zeros((n_sites, n_phonons + 1, n_max + 1), dtype=np.int64)
    for i in range(n_sites):
        after = n_sites - 1 - i
        for rem in range(n_phonons + 1):
            top = min(n_max, rem)
            running = 0
            for v in range(top, -1, -1):
                table[i, rem, v] = running
                running += counts[after][rem - v]
    return table


def enumerate_sector(n_sites: int, n_phonons: int, n_max: int) -> SectorBasis:
    """All occupation vectors with sum ``n_phonons`` and entries at most ``n_max``."""
    _check_arguments(n_sites, n_phonons, n_max)
    if n_sites == 0 or n_phonons > n_sites * n_max:
        raise EmptySectorError(
            f"no states: {n_phonons} phonons on {n_sites} sites with n_max={n_max}"
        )

    states = np.zeros((1, 0), dtype=np.int64)
    remaining = np.array([n_phonons], dtype=np.int64)
    for site in range(n_sites):
        sites_after = n_sites - site - 1
        high = np.minimum(remaining, n_max)
        low = np.maximum(0, remaining - sites_after * n_max)
        counts = np.maximum(high - low + 1, 0)
        rows = np.repeat(np.arange(states.shape[0]), counts)
        offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        values = high[rows] - offsets
        states = np.column_stack([states[rows], values])
        remaining = remaining[rows] - values

    states.setflags(write=False)
    return SectorBasis(n_sites, n_phonons, n_max, states, _rank_table(n_sites, n_phonons, n_max))
