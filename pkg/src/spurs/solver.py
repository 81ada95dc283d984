"""Sparse assembly and direct factorization of the augmented tableau.

The interpolation constraints ``b = Phi c`` are solved as a weighted,
Tikhonov-regularized least-squares problem through the sparse tableau
(Hachtel augmented) system

    Psi = [[ I          Gb @ Phi ],           Psi [r; c] = [Gb @ b; 0],
           [ Phi.T @ Gb   -rho I ]]

with Gb the diagonal square-root weight matrix.  Psi is symmetric
quasi-definite for rho > 0, which admits a static-pivot triangular
factorization for any symmetric ordering: the leading identity block is
eliminated exactly, and the remaining Schur complement
``C = rho I + Phi.T G Phi`` is symmetric positive definite and is
factored by SuperLU with a minimum-degree ordering and diagonal pivots.
The composed factors satisfy ``P (R^-1 Psi) Q = L U`` with R = I (row
equilibration is skipped; the factorization residual is what is tested).
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import FactorizationError, OutOfExtentError, ValidationError
from .grid import GridSpec
from .kernels import KernelSpec, bspline_eval
from .trajectories import Trajectory
from .validation import check_weights

__all__ = [
    "assemble_phi",
    "TableauSystem",
    "assemble_tableau",
    "Factorization",
    "factorize",
    "solve",
    "NnzReport",
    "nnz_report",
]

_STATIC_OPTIONS = dict(Equil=False, SymmetricMode=True, DiagPivotThresh=0.0)
_PIVOT_OPTIONS = dict(Equil=False, SymmetricMode=False, DiagPivotThresh=1.0)


def _axis_nodes_weights(coords, sigma, degree, half_points):
    """Vectorized per-axis footprint nodes/weights for all samples."""
    t = coords * sigma
    half_support = (degree + 1) / 2.0
    base = np.ceil(t - half_support).astype(np.int64)
    offsets = np.arange(int(np.floor(2 * half_support)) + 1, dtype=np.int64)
    nodes = base[:, None] + offsets[None, :]
    weights = bspline_eval(degree, t[:, None] - nodes)
    valid = (weights != 0.0) & (nodes >= -half_points) & (nodes < half_points)
    return nodes, weights, valid


def assemble_phi(traj: Trajectory, grid: GridSpec, kernel: KernelSpec):
    """Sparse interpolation matrix Phi with ``Phi[m, n] = q(kappa_m - k_n)``.

    Returns a CSR matrix of shape (M, points_per_dim**dim) with sorted,
    duplicate-free columns; row m holds the tensorized kernel footprint
    of sample m.  Grid-edge footprints are clipped, and a sample whose
    footprint is entirely clipped raises `OutOfExtentError`.
    """
    if traj.dim != grid.dim:
        raise ValidationError(f"trajectory dim {traj.dim} != grid dim {grid.dim}")
    pts = traj.points
    if np.any(np.abs(pts) > grid.half_extent):
        bad = int(np.argmax(np.any(np.abs(pts) > grid.half_extent, axis=1)))
        raise OutOfExtentError(
            f"sample {bad} at {tuple(pts[bad])} outside grid extent +/-{grid.half_extent}"
        )
    m_total = traj.num_samples
    half_points = grid.points_per_dim // 2
    L = grid.points_per_dim

    per_dim = [
        _axis_nodes_weights(pts[:, d], grid.sigma, kernel.degree, half_points)
        for d in range(grid.dim)
    ]
    if grid.dim == 1:
        nodes, weights, valid = per_dim[0]
        cols = nodes + half_points
        vals = weights
        keep = valid
    else:
        (n0, w0, v0), (n1, w1, v1) = per_dim
        cols = ((n0 + half_points)[:, :, None] * L + (n1 + half_points)[:, None, :]).reshape(m_total, -1)
        vals = (w0[:, :, None] * w1[:, None, :]).reshape(m_total, -1)
        keep = (v0[:, :, None] & v1[:, None, :]).reshape(m_total, -1)

    per_row = keep.sum(axis=1)
    if np.any(per_row == 0):
        bad = int(np.argmax(per_row == 0))
        raise OutOfExtentError(
            f"sample {bad} at {tuple(pts[bad])} has an entirely clipped footprint"
        )
    rows = np.repeat(np.arange(m_total), per_row)
    phi = sp.csr_matrix(
        (vals[keep], (rows, cols[keep])), shape=(m_total, L ** grid.dim)
    )
    phi.sum_duplicates()
    phi.sort_indices()
    return phi


@dataclass(frozen=True)
class TableauSystem:
    """The assembled augmented system and its block structure."""

    psi: sp.csc_matrix
    gamma_bar: np.ndarray
    rho: float
    num_samples: int
    num_grid: int

    @property
    def size(self):
        return self.num_samples + self.num_grid

    def phi_block(self):
        """Recover Gb @ Phi (the upper-right block) from psi."""
        return self.psi[: self.num_samples, self.num_samples:]


def assemble_tableau(phi, gamma_bar, rho):
    """Build the symmetric quasi-definite tableau from Phi, weights, rho.

    ``gamma_bar`` is the square-root weight diagonal (length M, all
    positive) or None for identity weights.
    """
    phi = phi.tocsr()
    m, g = phi.shape
    gamma_bar = check_weights(gamma_bar, m)
    if gamma_bar is None:
        gamma_bar = np.ones(m)
    rho = float(rho)
    if not np.isfinite(rho) or rho <= 0:
        raise ValidationError(f"rho must be positive, got {rho}")
    weighted = sp.diags(gamma_bar) @ phi
    psi = sp.bmat(
        [
            [sp.identity(m, format="csr"), weighted],
            [weighted.T, -rho * sp.identity(g, format="csr")],
        ],
        format="csc",
    )
    psi.sort_indices()
    return TableauSystem(psi=psi, gamma_bar=gamma_bar, rho=rho, num_samples=m, num_grid=g)


@dataclass(frozen=True)
class Factorization:
    """Triangular factors with permutations: ``P (R^-1 Psi) Q = L U``.

    ``perm_r`` and ``perm_c`` follow the SuperLU convention: the
    permutation matrices are ``P[perm_r[i], i] = 1`` and
    ``Q[i, perm_c[i]] = 1``.  ``row_scale`` holds the diagonal of R.
    """

    lower: sp.csr_matrix
    upper: sp.csr_matrix
    perm_r: np.ndarray
    perm_c: np.ndarray
    row_scale: np.ndarray
    tableau: TableauSystem

    @property
    def size(self):
        return self.lower.shape[0]

    @property
    def num_samples(self):
        return self.tableau.num_samples


def _splu_static(matrix):
    """SuperLU with minimum-degree ordering and static diagonal pivoting,
    falling back to threshold partial pivoting on a failed pivot."""
    try:
        return spla.splu(matrix, permc_spec="MMD_AT_PLUS_A", options=dict(_STATIC_OPTIONS))
    except RuntimeError:
        try:
            return spla.splu(matrix, permc_spec="COLAMD", options=dict(_PIVOT_OPTIONS))
        except RuntimeError as exc:
            raise FactorizationError(f"sparse factorization failed: {exc}") from exc


def factorize(tableau: TableauSystem):
    """Factor the tableau; reusable across right-hand sides."""
    m, g = tableau.num_samples, tableau.num_grid
    weighted = tableau.phi_block().tocsc()
    schur = (weighted.T @ weighted + tableau.rho * sp.identity(g, format="csc")).tocsc()
    schur.sort_indices()
    lu = _splu_static(schur)
    inv_r = np.argsort(lu.perm_r)
    inv_c = np.argsort(lu.perm_c)
    lower = sp.bmat(
        [[sp.identity(m, format="csr"), None],
         [weighted.T.tocsr()[inv_r], lu.L]],
        format="csr",
    )
    upper = sp.bmat(
        [[sp.identity(m, format="csr"), weighted.tocsc()[:, inv_c]],
         [None, -lu.U]],
        format="csr",
    )
    perm_r = np.concatenate([np.arange(m, dtype=np.int64), m + lu.perm_r])
    perm_c = np.concatenate([np.arange(m, dtype=np.int64), m + lu.perm_c])
    return Factorization(
        lower=lower,
        upper=upper,
        perm_r=perm_r,
        perm_c=perm_c,
        row_scale=np.ones(m + g),
        tableau=tableau,
    )


def _solve_real(fact: Factorization, rhs):
    y = np.empty(fact.size)
    y[fact.perm_r] = rhs / fact.row_scale
    z = spla.spsolve_triangular(fact.lower, y, lower=True)
    w = spla.spsolve_triangular(fact.upper, z, lower=False)
    return w[fact.perm_c]


def solve(fact: Factorization, rhs, refine=1):
    """Solve ``Psi z = rhs`` using the stored factors.

    Complex right-hand sides are handled as two independent real solves
    against the real factors.  ``refine`` steps of iterative refinement
    (default 1) keep the residual near machine precision.
    """
    rhs = np.asarray(rhs)
    if rhs.shape != (fact.size,):
        raise ValidationError(f"rhs has shape {rhs.shape}, expected ({fact.size},)")
    psi = fact.tableau.psi

    def run(vec):
        x = _solve_real(fact, vec)
        for _ in range(refine):
            x = x + _solve_real(fact, vec - psi @ x)
        return x

    if np.iscomplexobj(rhs):
        return run(rhs.real.astype(float)) + 1j * run(rhs.imag.astype(float))
    return run(rhs.astype(float))


@dataclass(frozen=True)
class NnzReport:
    nnz_phi: int
    nnz_psi: int
    nnz_factors: int
    fill_ratio: float

    def __str__(self):
        return (
            f"nnz(Phi)={self.nnz_phi} nnz(Psi)={self.nnz_psi} "
            f"nnz(L+U)={self.nnz_factors} fill={self.fill_ratio:.2f}"
        )


def nnz_report(phi, tableau: TableauSystem, fact: Factorization):
    """Sparsity counts: Phi, Psi, triangular factors, and fill ratio."""
    combined = abs(fact.lower) + abs(fact.upper)
    nnz_lu = int(combined.nnz)
    return NnzReport(
        nnz_phi=int(phi.nnz),
        nnz_psi=int(tableau.psi.nnz),
        nnz_factors=nnz_lu,
        fill_ratio=nnz_lu / tableau.psi.nnz,
    )
