"""Cartesian grid bookkeeping and centered discrete Fourier transforms.

Conventions used everywhere in this package:

* Grids are square with an even base size ``n`` per dimension and an
  oversampling factor ``sigma >= 1`` such that ``sigma * n`` is an even
  integer.  The base k-space spacing is fixed to 1, so coordinates are
  in units of 1/FOV and the FOV is 1.
* Arrays are stored centered: storage index ``i`` along an axis maps to
  the logical index ``m = i - sigma*n/2``.  Grid node ``m`` sits at
  k-coordinate ``m / sigma``; image pixel ``m`` sits at ``m / n``.
* The forward transform is unnormalized; the inverse carries
  ``1 / (sigma*n)**dim``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = [
    "GridSpec",
    "ComplexGrid",
    "ImageGrid",
    "forward_dft",
    "inverse_dft",
    "crop_to_fov",
]


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a (possibly oversampled) square Cartesian k-space grid.

    Parameters
    ----------
    dim : int
        Problem dimension, 1 or 2.
    n : int
        Base grid points per dimension; must be even.
    sigma : float
        Oversampling factor, >= 1; ``sigma * n`` must be an even integer.
        Oversampling densifies the grid but never extends its k-space
        span, which stays ``n`` per dimension.
    """

    dim: int
    n: int
    sigma: float = 1.0
    delta: float = field(default=1.0, init=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValidationError(f"dim must be 1 or 2, got {self.dim}")
        if self.n < 2 or self.n % 2 != 0:
            raise ValidationError(f"n must be a positive even integer, got {self.n}")
        if not np.isfinite(self.sigma) or self.sigma < 1:
            raise ValidationError(f"sigma must be >= 1, got {self.sigma}")
        pts = self.sigma * self.n
        if abs(pts - round(pts)) > 1e-9 or round(pts) % 2 != 0:
            raise ValidationError(
                f"sigma*n must be an even integer, got sigma={self.sigma}, n={self.n}"
            )

    @property
    def points_per_dim(self):
        """Oversampled grid points per dimension (sigma * n)."""
        return int(round(self.sigma * self.n))

    @property
    def shape(self):
        return (self.points_per_dim,) * self.dim

    @property
    def image_shape(self):
        return (self.n,) * self.dim

    @property
    def num_points(self):
        return self.points_per_dim ** self.dim

    @property
    def half_extent(self):
        """Largest |k| admitted per dimension (n * delta / 2)."""
        return self.n * self.delta / 2.0

    def node_coordinates(self):
        """1D array of per-axis k-coordinates of the grid nodes."""
        half = self.points_per_dim // 2
        return np.arange(-half, half) / self.sigma

    def pixel_coordinates(self, cropped=True):
        """1D array of per-axis image coordinates of pixel centers."""
        half = self.n // 2 if cropped else self.points_per_dim // 2
        return np.arange(-half, half) / (self.delta * self.n)


def _check_grid_array(values, spec, name="values"):
    arr = np.asarray(values)
    if arr.shape != spec.shape:
        raise ValidationError(f"{name} has shape {arr.shape}, expected {spec.shape}")
    return arr


@dataclass(frozen=True)
class ComplexGrid:
    """Complex values on the oversampled Cartesian k-space grid."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        arr = _check_grid_array(self.values, self.spec).astype(np.complex128, copy=False)
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class ImageGrid:
    """Complex image on the base (FOV-cropped) pixel grid."""

    spec: GridSpec
    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.shape != self.spec.image_shape:
            raise ValidationError(
                f"pixels have shape {arr.shape}, expected {self.spec.image_shape}"
            )
        arr = arr.astype(np.complex128, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)


def forward_dft(values, spec=None):
    """Centered forward DFT, unnormalized.

    ``X[k] = sum_m x[m] exp(-2j pi k.m / L)`` with both ``m`` and ``k``
    running over the centered index set ``[-L/2, L/2)``.
    """
    arr = np.asarray(values)
    if spec is not None:
        arr = _check_grid_array(arr, spec)
    axes = tuple(range(arr.ndim))
    return np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(arr, axes=axes), axes=axes), axes=axes)


def inverse_dft(values, spec=None):
    """Centered inverse DFT scaled by 1/L**dim; inverse of `forward_dft`."""
    arr = values.values if isinstance(values, ComplexGrid) else np.asarray(values)
    if spec is not None:
        arr = _check_grid_array(arr, spec)
    axes = tuple(range(arr.ndim))
    return np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(arr, axes=axes), axes=axes), axes=axes)


def crop_to_fov(image, spec):
    """Retain the central ``n**dim`` block of an oversampled-grid image.

    Pixel coordinates are preserved (|x| < FOV/2); for sigma = 1 this is
    the identity.
    """
    arr = _check_grid_array(image, spec, name="image")
    if spec.sigma == 1.0:
        return arr.copy()
    lo = (spec.points_per_dim - spec.n) // 2
    hi = lo + spec.n
    sl = tuple(slice(lo, hi) for _ in range(spec.dim))
    return arr[sl].copy()
