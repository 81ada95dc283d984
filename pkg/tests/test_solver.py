import numpy as np
import pytest
import scipy.sparse as sp

from spurs import (
    GridSpec,
    KernelSpec,
    Trajectory,
    ValidationError,
    assemble_phi,
    assemble_tableau,
    factorize,
    nnz_report,
    solve,
)
from spurs.solver import _splu_static


def factor_residual(fact):
    """max-abs of P (R^-1 Psi) Q - L U, computed sparsely."""
    n = fact.size
    psi = fact.tableau.psi
    pr = sp.csr_matrix((np.ones(n), (fact.perm_r, np.arange(n))), shape=(n, n))
    pc = sp.csr_matrix((np.ones(n), (np.arange(n), fact.perm_c)), shape=(n, n))
    scaled = sp.diags(1.0 / fact.row_scale) @ psi
    diff = (pr @ scaled @ pc) - (fact.lower @ fact.upper).tocsr()
    return np.abs(diff.data).max() if diff.nnz else 0.0


def random_instance(seed, m=24, n=16, dim=1, sigma=1.0, degree=3, rho=1e-6):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-n / 2, n / 2, (m, dim))
    traj = Trajectory(pts)
    grid = GridSpec(dim=dim, n=n, sigma=sigma)
    phi = assemble_phi(traj, grid, KernelSpec(degree))
    tableau = assemble_tableau(phi, None, rho)
    return phi, tableau


class TestAssemblePhi:
    def test_1d_linear_midpoint_row(self):
        traj = Trajectory(np.array([[0.5]]))
        phi = assemble_phi(traj, GridSpec(dim=1, n=4), KernelSpec(1))
        assert phi.shape == (1, 4)
        dense = phi.toarray()[0]
        assert np.allclose(dense, [0.0, 0.0, 0.5, 0.5])  # nodes 0 and 1

    def test_on_node_selection_matrix(self):
        traj = Trajectory(np.array([[-2.0], [0.0], [1.0]]))
        phi = assemble_phi(traj, GridSpec(dim=1, n=8), KernelSpec(1))
        assert phi.nnz == 3
        assert np.all(phi.data == 1.0)
        assert list(phi.indices) == [2, 4, 5]

    def test_2d_cubic_interior_row_count(self):
        traj = Trajectory(np.array([[0.3, -0.7]]))
        phi = assemble_phi(traj, GridSpec(dim=2, n=8), KernelSpec(3))
        assert phi.nnz == 16

    def test_row_sums_partition_of_unity(self):
        # interior samples: footprints clear of the grid edge
        rng = np.random.default_rng(0)
        pts = rng.uniform(-13, 13, (50, 1))
        phi = assemble_phi(Trajectory(pts), GridSpec(dim=1, n=32), KernelSpec(3))
        sums = np.asarray(phi.sum(axis=1)).ravel()
        assert np.max(np.abs(sums - 1.0)) <= 1e-12

    def test_nnz_bound_and_interior_equality(self):
        rng = np.random.default_rng(1)
        m = 40
        pts = rng.uniform(-6, 6, (m, 2))  # interior of the n=16 grid
        phi = assemble_phi(Trajectory(pts), GridSpec(dim=2, n=16), KernelSpec(3))
        assert phi.nnz == m * 16

    def test_out_of_extent_propagates(self):
        from spurs import OutOfExtentError

        traj = Trajectory(np.array([[9.0]]))
        with pytest.raises(OutOfExtentError):
            assemble_phi(traj, GridSpec(dim=1, n=16), KernelSpec(3))


class TestAssembleTableau:
    def test_2x2_block_values(self):
        phi = sp.csr_matrix(np.array([[1.0]]))
        tab = assemble_tableau(phi, np.array([1.0]), 0.5)
        assert np.allclose(tab.psi.toarray(), [[1.0, 1.0], [1.0, -0.5]])

    def test_nnz_identity_exact(self):
        phi, tab = random_instance(2, m=60, n=16, dim=2, sigma=2.0)
        g = tab.num_grid
        assert tab.psi.nnz == 2 * phi.nnz + 60 + g

    def test_symmetry(self):
        _, tab = random_instance(3, m=30)
        diff = (tab.psi - tab.psi.T).tocoo()
        assert diff.nnz == 0 or np.max(np.abs(diff.data)) == 0.0

    def test_rejects_nonpositive(self):
        phi = sp.csr_matrix(np.array([[1.0]]))
        with pytest.raises(ValidationError):
            assemble_tableau(phi, np.array([0.0]), 0.5)
        with pytest.raises(ValidationError):
            assemble_tableau(phi, None, 0.0)


class TestFactorize:
    def test_2x2_hand_oracle(self):
        phi = sp.csr_matrix(np.array([[1.0]]))
        tab = assemble_tableau(phi, None, 0.5)
        fact = factorize(tab)
        assert factor_residual(fact) <= 1e-14

    def test_identity_factors_trivially(self):
        lu = _splu_static(sp.identity(12, format="csc"))
        assert (lu.L - sp.identity(12)).nnz == 0
        assert (lu.U - sp.identity(12)).nnz == 0

    def test_random_1d_residual(self):
        _, tab = random_instance(4)
        fact = factorize(tab)
        scaled_max = np.abs((sp.diags(1.0 / fact.row_scale) @ tab.psi).data).max()
        assert factor_residual(fact) <= 1e-10 * scaled_max

    def test_triangularity_and_permutations(self):
        _, tab = random_instance(5, m=40, n=16, dim=2)
        fact = factorize(tab)
        assert (sp.triu(fact.lower, k=1)).nnz == 0
        assert (sp.tril(fact.upper, k=-1)).nnz == 0
        for perm in (fact.perm_r, fact.perm_c):
            assert np.array_equal(np.sort(perm), np.arange(fact.size))
        assert np.all(fact.row_scale > 0)


class TestSolve:
    def test_zero_rhs(self):
        _, tab = random_instance(6)
        fact = factorize(tab)
        assert np.all(solve(fact, np.zeros(fact.size)) == 0)

    def test_2x2_hand_solution(self):
        phi = sp.csr_matrix(np.array([[1.0]]))
        tab = assemble_tableau(phi, None, 0.5)
        fact = factorize(tab)
        b = 3.7
        z = solve(fact, np.array([b, 0.0]))
        assert z[0] == pytest.approx(b / 3.0, rel=1e-12)   # residual block
        assert z[1] == pytest.approx(2.0 * b / 3.0, rel=1e-12)  # coefficients

    def test_residual_random(self):
        _, tab = random_instance(7, m=200, n=64)
        fact = factorize(tab)
        rng = np.random.default_rng(8)
        rhs = rng.standard_normal(fact.size)
        z = solve(fact, rhs)
        assert np.linalg.norm(tab.psi @ z - rhs) <= 1e-10 * np.linalg.norm(rhs)

    def test_complex_rhs_two_real_solves(self):
        _, tab = random_instance(9)
        fact = factorize(tab)
        rng = np.random.default_rng(10)
        re = rng.standard_normal(fact.size)
        im = rng.standard_normal(fact.size)
        z = solve(fact, re + 1j * im)
        assert np.array_equal(z.real, solve(fact, re))
        assert np.array_equal(z.imag, solve(fact, im))

    def test_factor_reuse_bit_identical(self):
        _, tab = random_instance(11)
        fact = factorize(tab)
        rhs = np.random.default_rng(12).standard_normal(fact.size)
        assert np.array_equal(solve(fact, rhs), solve(fact, rhs))

    def test_length_mismatch(self):
        _, tab = random_instance(13)
        fact = factorize(tab)
        with pytest.raises(ValidationError):
            solve(fact, np.zeros(fact.size + 1))

    def test_normal_equation_consistency(self):
        phi, tab = random_instance(14, m=80, n=32)
        fact = factorize(tab)
        rng = np.random.default_rng(15)
        b = rng.standard_normal(80)
        z = solve(fact, np.concatenate([b, np.zeros(32)]))
        c = z[80:]
        lhs = phi.T @ (phi @ c) + tab.rho * c
        rhs = phi.T @ b
        assert np.linalg.norm(lhs - rhs) <= 1e-8 * np.linalg.norm(rhs)

    def test_residual_block_definition(self):
        phi, tab = random_instance(16, m=50, n=16)
        fact = factorize(tab)
        b = np.random.default_rng(17).standard_normal(50)
        z = solve(fact, np.concatenate([b, np.zeros(16)]))
        r, c = z[:50], z[50:]
        assert np.linalg.norm(r - (b - phi @ c)) <= 1e-10 * np.linalg.norm(b)


class TestNnzReport:
    def test_2x2_fill_ratio_one(self):
        phi = sp.csr_matrix(np.array([[1.0]]))
        tab = assemble_tableau(phi, None, 0.5)
        fact = factorize(tab)
        report = nnz_report(phi, tab, fact)
        assert report.fill_ratio == pytest.approx(1.0)
        assert report.nnz_psi == 4

    def test_formula_and_bounds(self):
        phi, tab = random_instance(18, m=100, n=16, dim=2, sigma=2.0)
        fact = factorize(tab)
        report = nnz_report(phi, tab, fact)
        assert report.nnz_phi <= 100 * 16
        assert report.nnz_psi == 2 * report.nnz_phi + 100 + tab.num_grid
        assert report.nnz_factors >= report.nnz_psi - 100 - tab.num_grid


class TestQuasiDefiniteness:
    def test_leading_minors_nonzero_under_permutation(self):
        rng = np.random.default_rng(19)
        phi, tab = random_instance(20, m=10, n=8)
        dense = tab.psi.toarray()
        n = dense.shape[0]
        for trial in range(5):
            perm = rng.permutation(n)
            permuted = dense[np.ix_(perm, perm)]
            for k in range(1, n + 1):
                minor = np.linalg.det(permuted[:k, :k])
                assert minor != 0.0
