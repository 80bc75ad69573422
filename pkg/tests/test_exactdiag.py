"""Tests for ionphonon.solvers.exactdiag."""
from math import comb
from unittest.mock import patch

import numpy as np
import pytest

from ionphonon.analysis.observables import build_report
from ionphonon.chain.geometry import microtrap_positions
from ionphonon.chain.model import apply_site_pattern, build_model
from ionphonon.core.errors import (
    ConvergenceError,
    EmptySectorError,
    InvalidInputError,
    UndefinedGapError,
)
from ionphonon.solvers import create_solver
from ionphonon.solvers.exactdiag.basis import enumerate_sector, sector_dimension
from ionphonon.solvers.exactdiag.solver import (
    ExactDiagonalizationSolver,
    ExactState,
    SectorOperator,
    _lowest,
    ed_gap,
    ed_ground_manifold,
    ed_ground_state,
    sector_hamiltonian,
)


def _ground(model):
    basis = enumerate_sector(model.n_sites, model.n_phonons, model.n_max)
    pair = ed_ground_state(model, basis)[0]
    return basis, pair


class TestSectorBasis:
    """Occupation-number enumeration and ranking."""

    @pytest.mark.parametrize("n_sites,n_phonons,n_max,expected", [
        (4, 4, 4, comb(7, 3)),
        (4, 2, 1, comb(4, 2)),
        (3, 4, 2, 6),
        (5, 0, 3, 1),
        (6, 12, 12, comb(17, 5)),
    ])
    def test_sector_dimension(self, n_sites, n_phonons, n_max, expected):
        assert sector_dimension(n_sites, n_phonons, n_max) == expected
        assert enumerate_sector(n_sites, n_phonons, n_max).dimension == expected

    def test_infeasible_dimension_is_zero(self):
        assert sector_dimension(3, 7, 2) == 0

    def test_enumeration_order(self):
        # Given: Four phonons on four sites
        basis = enumerate_sector(4, 4, 4)

        # Then: Descending lexicographic order, first site most significant
        np.testing.assert_array_equal(basis.states[0], [4, 0, 0, 0])
        np.testing.assert_array_equal(basis.states[-1], [0, 0, 0, 4])
        keys = [tuple(state) for state in basis.states]
        assert keys == sorted(keys, reverse=True)

    def test_every_state_is_valid(self):
        basis = enumerate_sector(5, 6, 3)

        assert np.all(basis.states.sum(axis=1) == 6)
        assert basis.states.max() <= 3
        assert len({tuple(s) for s in basis.states}) == basis.dimension

    def test_index_inverts_enumeration(self):
        basis = enumerate_sector(5, 5, 3)

        np.testing.assert_array_equal(basis.index_of(basis.states), np.arange(basis.dimension))
        assert basis.index([1, 1, 1, 1, 1]) == basis.index_of(np.array([1, 1, 1, 1, 1]))

    def test_index_rejects_foreign_state(self):
        basis = enumerate_sector(3, 3, 2)

        with pytest.raises(InvalidInputError):
            basis.index([3, 0, 0])

    def test_empty_sector(self):
        with pytest.raises(EmptySectorError):
            enumerate_sector(2, 5, 2)


class TestSectorHamiltonian:
    """Matrix elements and the matrix-free operator."""

    def test_hermitian(self, paul_model):
        basis = enumerate_sector(5, 5, 5)

        matrix = sector_hamiltonian(paul_model, basis).toarray()

        np.testing.assert_allclose(matrix, matrix.T, atol=1e-14)

    def test_matrix_free_matches_sparse(self, paul_model):
        # Given: A random vector in the sector
        basis = enumerate_sector(5, 5, 5)
        vector = np.random.default_rng(7).standard_normal(basis.dimension)

        # When: Applying both representations, the threaded one in small chunks
        sparse = sector_hamiltonian(paul_model, basis) @ vector
        free = SectorOperator(paul_model, basis, workers=3, chunk_size=50).matvec(vector)

        # Then
        np.testing.assert_allclose(free, sparse, atol=1e-12)

    def test_basis_model_mismatch(self, microtrap_model):
        basis = enumerate_sector(4, 3, 4)

        with pytest.raises(InvalidInputError):
            sector_hamiltonian(microtrap_model, basis)


class TestGroundState:
    """Closed-form checks of the exact ground state."""

    def test_two_site_single_phonon(self):
        # Given: H = [[-1, 1], [1, -1]] in the one-phonon sector
        model = build_model(microtrap_positions(2), 0.0, n_phonons=1, n_max=1)

        _, pair = _ground(model)

        assert pair.energy == pytest.approx(-2.0, abs=1e-12)
        np.testing.assert_allclose(np.abs(pair.vector), [2 ** -0.5] * 2, atol=1e-12)

    def test_non_interacting_condensate(self, free_model):
        # Given: U = 0 and n_max >= N_ph
        lam = np.linalg.eigvalsh(free_model.one_particle_matrix())[0]

        _, pair = _ground(free_model)

        # Then: Every phonon occupies the lowest one-particle mode
        assert pair.energy == pytest.approx(free_model.n_phonons * lam, abs=1e-10)

    def test_uniform_shift_covariance(self, paul_model):
        _, pair = _ground(paul_model)
        _, shifted = _ground(paul_model.with_onsite_shift(0.3))

        assert shifted.energy == pytest.approx(pair.energy + 0.3 * paul_model.n_phonons, abs=1e-10)

    def test_sum_rules(self, paul_model):
        basis, pair = _ground(paul_model)
        state = ExactState(paul_model, basis, pair.vector)

        # Then: Total number is conserved and connected density correlations sum to zero
        density = state.density()
        cnn = state.density_correlations() - np.outer(density, density)
        assert density.sum() == pytest.approx(5.0, abs=1e-10)
        np.testing.assert_allclose(cnn.sum(axis=1), 0.0, atol=1e-10)

    def test_reflection_symmetric_profile(self, microtrap_model):
        basis, pair = _ground(microtrap_model)
        state = ExactState(microtrap_model, basis, pair.vector)

        np.testing.assert_allclose(state.density(), state.density()[::-1], atol=1e-10)

    def test_hopping_correlations_are_symmetric(self, microtrap_model):
        basis, pair = _ground(microtrap_model)
        hop = ExactState(microtrap_model, basis, pair.vector).hopping_correlations()

        np.testing.assert_allclose(hop, hop.T, atol=1e-12)
        np.testing.assert_allclose(np.diag(hop), ExactState(microtrap_model, basis, pair.vector).density())

    @pytest.mark.parametrize("fixture", ["microtrap_model", "paul_model"])
    def test_correlators_are_reflection_symmetric(self, fixture, request):
        # Given: A reflection-symmetric chain with a non-degenerate ground state
        model = request.getfixturevalue(fixture)
        basis, pair = _ground(model)

        # When
        report = build_report(ExactState(model, basis, pair.vector).measurements())

        # Then: C_ij = C_{N+1-i, N+1-j}
        np.testing.assert_allclose(report.caa, report.caa[::-1, ::-1], atol=1e-10)
        np.testing.assert_allclose(report.cnn, report.cnn[::-1, ::-1], atol=1e-10)

    def test_k_larger_than_sector(self):
        model = build_model(microtrap_positions(2), 0.0, n_phonons=1, n_max=1)
        basis = enumerate_sector(2, 1, 1)

        with pytest.raises(InvalidInputError):
            ed_ground_state(model, basis, k=3)

    def test_residual_bound_follows_energy_scale(self):
        # Given: U_odd = 40 t at filling two, so |E| is several hundred t
        model = build_model(microtrap_positions(6), 40.0, n_phonons=12, n_max=5)
        model = apply_site_pattern(model, "alternating", 40.0, 80.0)
        basis = enumerate_sector(6, 12, 5)

        # When
        pairs = ed_ground_state(model, basis, k=2)

        # Then: The pairs are accepted and accurate relative to |E|
        assert abs(pairs[0].energy) > 100.0
        hamiltonian = sector_hamiltonian(model, basis)
        for pair in pairs:
            residual = np.linalg.norm(hamiltonian @ pair.vector - pair.energy * pair.vector)
            assert residual <= 1e-10 * abs(pair.energy)

    def test_inaccurate_eigenpair_is_rejected(self, microtrap_model):
        # Given: An eigensolver that returns a perturbed ground vector
        basis = enumerate_sector(4, 4, 4)
        energies, vectors, tier = _lowest(microtrap_model, basis, 1, 0, 1)
        noisy = vectors + 1e-3 * np.random.default_rng(0).standard_normal(vectors.shape)

        # When / Then
        with patch("ionphonon.solvers.exactdiag.solver._lowest", return_value=(energies, noisy, tier)):
            with pytest.raises(ConvergenceError) as info:
                ed_ground_state(microtrap_model, basis)
        assert info.value.residual > 1e-6


class TestManifoldAndGap:
    """Degenerate manifolds and the sector gap."""

    def test_classical_alternating_manifold(self, alternating_classical_model):
        # Given: t = 0, eight phonons on four sites, U_even = 2 U_odd
        model = alternating_classical_model
        basis = enumerate_sector(4, 8, 4)

        # When
        manifold = ed_ground_manifold(model, basis)

        # Then: Two extra phonons on any two of the four sites, C(4, 2) states
        assert len(manifold) == comb(4, 2)
        assert manifold[0].energy == pytest.approx(12.0)

    def test_gap_of_two_sites(self):
        # Given: Two sites, one phonon: eigenvalues 0 and -2
        model = build_model(microtrap_positions(2), 0.0, n_phonons=1, n_max=1)

        assert ed_gap(model, enumerate_sector(2, 1, 1)) == pytest.approx(2.0)

    def test_alternating_gap_is_smallest_at_ratio_two(self):
        # Given: Six microtraps at filling two, U_odd = 40 t
        base = build_model(microtrap_positions(6), 40.0, n_phonons=12, n_max=5)
        basis = enumerate_sector(6, 12, 5)
        ratios = [1.9, 1.95, 2.0, 2.05, 2.1]

        # When
        gaps = [ed_gap(apply_site_pattern(base, "alternating", 40.0, 40.0 * r), basis) for r in ratios]

        # Then: The gap closes where U_even = 2 U_odd
        assert ratios[int(np.argmin(gaps))] == 2.0

    def test_gap_undefined_for_single_state(self):
        model = build_model(microtrap_positions(1), 1.0, n_phonons=2, n_max=2)

        with pytest.raises(UndefinedGapError):
            ed_gap(model, enumerate_sector(1, 2, 2))


class TestExactDiagonalizationSolver:
    """Solver wrapper used by the CLI."""

    def test_registry(self, microtrap_model):
        solver = create_solver("ed", microtrap_model, {"gap": True})

        assert isinstance(solver, ExactDiagonalizationSolver)
        assert solver.get_solver_name() == "ed"
        assert solver.estimate_dimension() == comb(7, 3)

    def test_solve_reports_gap(self, microtrap_model):
        result = create_solver("ed", microtrap_model, {"gap": True}).solve()

        assert result.solver == "ed"
        assert result.gap > 0
        assert not result.degenerate
        assert result.metadata["dimension"] == comb(7, 3)

    def test_degenerate_manifold_flagged(self, alternating_classical_model):
        result = create_solver("ed", alternating_classical_model).solve()

        # Then: The mixture has the symmetric average filling
        assert result.degenerate
        assert result.metadata["manifold_size"] == 6
        assert result.warnings
        np.testing.assert_allclose(result.measure().density, [2.5, 1.5, 2.5, 1.5], atol=1e-12)

    def test_unknown_solver(self, microtrap_model):
        with pytest.raises(InvalidInputError, match="unknown solver"):
            create_solver("qmc", microtrap_model)

    def test_n_max_override_must_fit(self, microtrap_model):
        with pytest.raises(InvalidInputError):
            create_solver("ed", microtrap_model, {"n_max": 0})
