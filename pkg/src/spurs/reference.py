"""Dense reference implementations and subspace diagnostics.

Everything here rebuilds the reconstruction map from its defining inner
products with dense linear algebra: kernel values from the one-sided
power form of the B-spline, cross-correlation (Gram) matrices by
per-piece Gauss-Legendre quadrature over one period, and regularized
pseudoinverses instead of sparse factors and FFTs.  It is deliberately
slow and size-guarded; production code never calls it, tests do.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import NumericalError, ValidationError
from .grid import GridSpec
from .trajectories import Trajectory
from .validation import check_samples, check_weights

__all__ = [
    "DENSE_SIZE_LIMIT",
    "bspline_power_form",
    "dense_reconstruct",
    "AngleDiagnostics",
    "angle_diagnostics",
]

DENSE_SIZE_LIMIT = 2000


def bspline_power_form(degree, t):
    """Centered cardinal B-spline via the alternating one-sided-power sum.

    Independent of the recurrence evaluator in `spurs.kernels`; exact up
    to rounding for degree >= 1.  Degree 0 falls back to the rectangle
    definition (value 1/2 on the knots).
    """
    t = np.asarray(t, dtype=float)
    if degree == 0:
        at = np.abs(t)
        return np.where(at < 0.5, 1.0, np.where(at == 0.5, 0.5, 0.0))
    p = int(degree)
    acc = np.zeros_like(t)
    for k in range(p + 2):
        arg = t + (p + 1) / 2.0 - k
        acc += (-1) ** k * math.comb(p + 1, k) * np.where(arg > 0, arg, 0.0) ** p
    return acc / math.factorial(p)


def _band_indices(n, sigma, points):
    """Retained image-domain mode indices: the full centered range for
    sigma = 1, the interior of the original FOV otherwise."""
    if sigma == 1.0:
        return np.arange(-points // 2, points // 2)
    return np.arange(-(n // 2) + 1, n // 2)


@lru_cache(maxsize=None)
def _projection_matrix(n, sigma, degree):
    """Dense per-dimension map from kernel coefficients to grid values.

    Built as ``E (A*A)^+ (A*Q)`` where the signal basis A holds the
    FOV-limited Fourier modes of one period, Q holds the periodized
    kernels at the grid nodes, inner products are evaluated by
    Gauss-Legendre quadrature on half-integer cells (kernel knots lie on
    cell boundaries), and E evaluates the projected function at the grid
    nodes.
    """
    spec = GridSpec(dim=1, n=n, sigma=sigma)
    points = spec.points_per_dim
    band = _band_indices(n, sigma, points)

    gl_nodes, gl_weights = leggauss(16)
    edges = np.arange(-points, points + 1) * 0.5
    mids = (edges[:-1] + edges[1:]) / 2.0
    t = (mids[:, None] + 0.25 * gl_nodes[None, :]).ravel()
    w = np.tile(0.25 * gl_weights, mids.size)

    nodes = np.arange(-points // 2, points // 2)
    q_basis = np.zeros((t.size, points))
    for col, node in enumerate(nodes):
        acc = np.zeros_like(t)
        for shift in (-points, 0, points):
            acc += bspline_power_form(degree, t - node + shift)
        q_basis[:, col] = acc

    a_basis = np.exp(2j * np.pi * band[None, :] * t[:, None] / points) / np.sqrt(points)
    gram_aa = a_basis.conj().T @ (w[:, None] * a_basis)
    cross_aq = a_basis.conj().T @ (w[:, None] * q_basis)
    coef = np.linalg.solve(gram_aa, cross_aq)
    evaluate = np.exp(2j * np.pi * band[None, :] * nodes[:, None] / points) / np.sqrt(points)
    return evaluate @ coef


def _guard_size(m, num_grid):
    if m + num_grid > DENSE_SIZE_LIMIT:
        raise ValidationError(
            f"dense reference limited to {DENSE_SIZE_LIMIT} unknowns, got {m + num_grid}"
        )


def _dense_phi(traj: Trajectory, grid: GridSpec, degree):
    half = grid.points_per_dim // 2
    nodes = np.arange(-half, half)
    cols = [
        bspline_power_form(degree, traj.points[:, d, None] * grid.sigma - nodes[None, :])
        for d in range(grid.dim)
    ]
    if grid.dim == 1:
        return cols[0]
    m = traj.num_samples
    return (cols[0][:, :, None] * cols[1][:, None, :]).reshape(m, -1)


def dense_reconstruct(traj: Trajectory, config, b):
    """Dense-path reconstruction of the Cartesian grid values.

    Solves the weighted regularized least-squares problem with a dense
    normal-equations solve, then applies the dense projection map; the
    result matches `spurs.engine.reconstruct_once` on small problems.
    """
    grid = GridSpec(dim=traj.dim, n=config.n, sigma=config.sigma)
    _guard_size(traj.num_samples, grid.num_points)
    b = check_samples(b, m=traj.num_samples)
    phi = _dense_phi(traj, grid, config.degree)
    gamma_bar = check_weights(config.gamma_bar, traj.num_samples)
    weights = np.ones(traj.num_samples) if gamma_bar is None else gamma_bar**2
    if config.rho is not None:
        rho = config.rho
    else:
        rho = 1e-6 * float((weights * (phi**2).sum(axis=1)).sum()) / phi.shape[1]
    normal = phi.T @ (weights[:, None] * phi) + rho * np.eye(phi.shape[1])
    coeffs = np.linalg.solve(normal, phi.T @ (weights * b))

    proj = _projection_matrix(grid.n, grid.sigma, config.degree)
    if grid.dim == 1:
        return proj @ coeffs
    c_grid = coeffs.reshape(grid.shape)
    return proj @ c_grid @ proj.T


@dataclass(frozen=True)
class AngleDiagnostics:
    """Principal-angle quantities and the reconstruction error bound."""

    cos_qs: float
    sin_as: float
    sin_aq: float
    bound: float
    actual: float
    signal_norm: float


def _orthonormal(basis, tol=1e-10):
    u, s, _ = np.linalg.svd(basis, full_matrices=False)
    rank = int(np.sum(s > tol * s[0]))
    return u[:, :rank]


def _min_cos(u_target, u_source):
    """inf over unit v in span(u_source) of ||P_{span(u_target)} v||."""
    s = np.linalg.svd(u_target.conj().T @ u_source, compute_uv=False)
    if u_target.shape[1] < u_source.shape[1]:
        return 0.0
    return float(s.min()) if s.size else 0.0


def _max_sin(u_target, u_source):
    """sup over unit v in span(u_source) of ||(I - P_{span(u_target)}) v||.

    Computed from the projection residual directly, which stays accurate
    for nearly-identical subspaces where 1 - cos^2 would cancel.
    """
    resid = u_source - u_target @ (u_target.conj().T @ u_source)
    s = np.linalg.svd(resid, compute_uv=False)
    return float(min(1.0, s.max())) if s.size else 0.0


def angle_diagnostics(traj: Trajectory, config, f_coeffs, q_equals_a=False, fine_per_cell=8):
    """Subspace angles, the error bound, and the actual error, densely.

    All subspaces are discretized on a fine uniform grid over one period
    (sample locations are snapped to it), so the bound inequality holds
    exactly in the discretized geometry.  ``f_coeffs`` are coefficients
    in the band-limited mode basis of the signal space; ``q_equals_a``
    replaces the kernel basis with the signal basis, in which case the
    reconstruction error vanishes.
    """
    grid = GridSpec(dim=traj.dim, n=config.n, sigma=config.sigma)
    if grid.dim != 1:
        raise ValidationError("angle diagnostics are implemented for 1D geometries")
    _guard_size(traj.num_samples, grid.num_points)
    points = grid.points_per_dim
    fine = fine_per_cell * points
    t = (np.arange(fine) - fine // 2) * (points / fine)

    band = _band_indices(grid.n, grid.sigma, points)
    a_basis = np.exp(2j * np.pi * band[None, :] * t[:, None] / points)
    if q_equals_a:
        q_basis = a_basis.copy()
    else:
        nodes = np.arange(-points // 2, points // 2)
        q_basis = np.zeros((fine, points))
        for col, node in enumerate(nodes):
            acc = np.zeros_like(t)
            for shift in (-points, 0, points):
                acc += bspline_power_form(config.degree, t - node + shift)
            q_basis[:, col] = acc

    idx = np.round(traj.points[:, 0] * grid.sigma * (fine / points)).astype(int) + fine // 2
    idx = np.unique(np.clip(idx, 0, fine - 1))
    s_basis = np.zeros((fine, idx.size))
    s_basis[idx, np.arange(idx.size)] = 1.0

    u_a = _orthonormal(a_basis)
    u_q = _orthonormal(q_basis)
    u_s = _orthonormal(s_basis)

    cos_qs = _min_cos(u_s, u_q)
    if cos_qs <= 1e-12:
        raise NumericalError("cos(Q, S) vanishes; the error bound is undefined")
    sin_as = _max_sin(u_s, u_a)
    sin_aq = _max_sin(u_q, u_a)

    f_hat = a_basis @ np.asarray(f_coeffs, dtype=complex)
    # oblique projection onto Q along S-perp, then orthogonal onto A
    sq = s_basis.T @ q_basis
    f_q = q_basis @ (np.linalg.pinv(sq, rcond=1e-12) @ (s_basis.T @ f_hat))
    g_hat = u_a @ (u_a.conj().T @ f_q)
    eps = f_hat - g_hat
    p_qperp_f = f_hat - u_q @ (u_q.conj().T @ f_hat)

    actual = float(np.linalg.norm(eps) ** 2)
    bound = float(sin_as**2 / cos_qs**2 * np.linalg.norm(p_qperp_f) ** 2)
    return AngleDiagnostics(
        cos_qs=float(cos_qs),
        sin_as=sin_as,
        sin_aq=sin_aq,
        bound=bound,
        actual=actual,
        signal_norm=float(np.linalg.norm(f_hat)),
    )
