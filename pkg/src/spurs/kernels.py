"""Compactly supported interpolation kernels: cardinal B-splines of any
degree, and their tensorized footprints on an oversampled grid.

The degree-p B-spline is the (p+1)-fold convolution of the centered unit
rectangle; its support is exactly p+1 grid cells.  Footprint offsets are
measured in cells of the *oversampled* grid, i.e. a sample at k-space
position kappa sees the kernel argument ``kappa * sigma / delta - m``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import OutOfExtentError, ValidationError
from .grid import GridSpec

__all__ = ["KernelSpec", "Footprint", "bspline_eval", "footprint"]


@dataclass(frozen=True)
class KernelSpec:
    """B-spline kernel of degree ``degree`` (support = degree + 1)."""

    degree: int

    def __post_init__(self):
        if self.degree < 0 or int(self.degree) != self.degree:
            raise ValidationError(f"degree must be a nonnegative integer, got {self.degree}")
        object.__setattr__(self, "degree", int(self.degree))

    @property
    def support(self):
        return self.degree + 1


def bspline_eval(degree, t):
    """Evaluate the centered cardinal B-spline of the given degree at t.

    Vectorized in ``t``.  Uses the two-term recurrence on the degree
    (exact piecewise-polynomial evaluation); the value at the degree-0
    knots |t| = 1/2 is 1/2.
    """
    if degree < 0:
        raise ValidationError(f"degree must be >= 0, got {degree}")
    t = np.asarray(t, dtype=float)

    def beta(p, x):
        if p == 0:
            ax = np.abs(x)
            return np.where(ax < 0.5, 1.0, np.where(ax == 0.5, 0.5, 0.0))
        h = (p + 1) / 2.0
        return ((x + h) * beta(p - 1, x + 0.5) + (h - x) * beta(p - 1, x - 0.5)) / p

    out = beta(int(degree), t)
    return out if out.shape else float(out)


@dataclass(frozen=True)
class Footprint:
    """Per-dimension grid indices and kernel weights of one sample.

    ``indices[d]`` holds the logical (centered) node indices with nonzero
    weight along dimension d, ``weights[d]`` the matching kernel values.
    The tensor product of the per-dimension entries defines the full
    footprint; it has at most (degree+1)**dim nonzeros.
    """

    indices: tuple
    weights: tuple

    @property
    def dim(self):
        return len(self.indices)

    def dense_entries(self):
        """Iterate ((n_0, ..., n_{dim-1}), weight) over the tensor product."""
        if self.dim == 1:
            for n, w in zip(self.indices[0], self.weights[0]):
                yield (int(n),), float(w)
        else:
            for n0, w0 in zip(self.indices[0], self.weights[0]):
                for n1, w1 in zip(self.indices[1], self.weights[1]):
                    yield (int(n0), int(n1)), float(w0 * w1)


def _axis_entries(t, degree, half_points):
    """Nonzero (node, weight) pairs along one axis at kernel argument t."""
    half_support = (degree + 1) / 2.0
    lo = int(np.ceil(t - half_support))
    hi = int(np.floor(t + half_support))
    nodes = np.arange(lo, hi + 1)
    weights = bspline_eval(degree, t - nodes)
    keep = (weights != 0.0) & (nodes >= -half_points) & (nodes < half_points)
    return nodes[keep], weights[keep]


def footprint(kappa, grid: GridSpec, kernel: KernelSpec):
    """Grid footprint of one k-space sample.

    Raises `OutOfExtentError` if the sample lies outside the grid extent
    or if clipping at the grid edge removes every weight.
    """
    pt = np.asarray(kappa, dtype=float).ravel()
    if pt.size != grid.dim:
        raise ValidationError(f"expected one {grid.dim}D point, got {kappa!r}")
    if not np.all(np.isfinite(pt)):
        raise ValidationError("sample coordinate is not finite")
    if np.any(np.abs(pt) > grid.half_extent):
        raise OutOfExtentError(
            f"sample {tuple(pt)} outside grid extent +/-{grid.half_extent}"
        )
    half_points = grid.points_per_dim // 2
    indices, weights = [], []
    for d in range(grid.dim):
        t = pt[d] * grid.sigma / grid.delta
        nodes, w = _axis_entries(t, kernel.degree, half_points)
        if nodes.size == 0:
            raise OutOfExtentError(
                f"sample {tuple(pt)} has an entirely clipped footprint"
            )
        indices.append(nodes)
        weights.append(w)
    return Footprint(tuple(indices), tuple(weights))
