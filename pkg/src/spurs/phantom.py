"""Analytic ellipse phantoms with closed-form k-space values.

An ellipse of amplitude A, semi-axes (a, b), center (x0, y0) and
rotation theta has the continuous Fourier transform

    F(kappa) = A * pi * a * b * jinc(2 pi r) * exp(-2j pi kappa . (x0, y0)),

where jinc(z) = 2 J1(z) / z (so F(0) = A * pi * a * b, the signed area)
and r = |(a kx', b ky')| with (kx', ky') the k-vector rotated by -theta.
Amplitudes of overlapping ellipses add.  All lengths are in FOV units,
i.e. the image support is expected inside [-1/2, 1/2)^2.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j1

from .errors import ValidationError
from .grid import GridSpec, ImageGrid
from .trajectories import Trajectory
from .validation import check_samples

__all__ = [
    "Ellipse",
    "Phantom",
    "SampleSet",
    "shepp_logan",
    "phantom_kspace",
    "phantom_image",
    "add_noise",
]


@dataclass(frozen=True)
class Ellipse:
    amplitude: float
    center: tuple
    semi_axes: tuple
    theta: float = 0.0

    def __post_init__(self):
        a, b = self.semi_axes
        if a <= 0 or b <= 0:
            raise ValidationError("ellipse semi-axes must be positive")
        x0, y0 = self.center
        reach = max(abs(x0) + max(a, b), abs(y0) + max(a, b))
        if reach > 0.5:
            warnings.warn(
                f"ellipse at {self.center} with axes {self.semi_axes} may extend "
                "beyond the [-0.5, 0.5) field of view",
                stacklevel=3,
            )


@dataclass(frozen=True)
class Phantom:
    ellipses: tuple

    def __post_init__(self):
        if len(self.ellipses) == 0:
            raise ValidationError("phantom needs at least one ellipse")
        object.__setattr__(self, "ellipses", tuple(self.ellipses))


# Standard high-contrast Shepp-Logan parameter set, rescaled from the
# conventional [-1, 1] coordinate box to FOV units ([-0.5, 0.5)):
# (amplitude, a, b, x0, y0, angle_deg) with lengths halved.
_SHEPP_LOGAN_ROWS = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)


def shepp_logan():
    """The 10-ellipse Shepp-Logan phantom scaled to the unit FOV."""
    ellipses = [
        Ellipse(
            amplitude=row[0],
            center=(row[3] / 2.0, row[4] / 2.0),
            semi_axes=(row[1] / 2.0, row[2] / 2.0),
            theta=np.deg2rad(row[5]),
        )
        for row in _SHEPP_LOGAN_ROWS
    ]
    return Phantom(tuple(ellipses))


def _jinc(z):
    """2 J1(z) / z, continuously extended to 1 at z = 0."""
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    nz = z != 0
    out[nz] = 2.0 * j1(z[nz]) / z[nz]
    return out


def phantom_kspace(ph: Phantom, traj: Trajectory):
    """Noiseless k-space samples of the phantom along a 2D trajectory."""
    if traj.dim != 2:
        raise ValidationError("phantom_kspace requires a 2D trajectory")
    kx = traj.points[:, 0]
    ky = traj.points[:, 1]
    b = np.zeros(traj.num_samples, dtype=np.complex128)
    for e in ph.ellipses:
        ct, st = np.cos(e.theta), np.sin(e.theta)
        kxr = kx * ct + ky * st
        kyr = -kx * st + ky * ct
        a, bb = e.semi_axes
        r = np.hypot(a * kxr, bb * kyr)
        x0, y0 = e.center
        b += (
            e.amplitude * np.pi * a * bb
            * _jinc(2 * np.pi * r)
            * np.exp(-2j * np.pi * (kx * x0 + ky * y0))
        )
    return SampleSet(trajectory=traj, b=b, isnr_db=None, seed=None)


def phantom_image(ph: Phantom, n):
    """Rasterize the phantom on the n x n pixel grid (center-point test).

    Pixel m has coordinate m/n for m in [-n/2, n/2); a pixel belongs to
    an ellipse when its center satisfies the ellipse inequality
    (boundary included).
    """
    spec = GridSpec(dim=2, n=int(n))
    x = spec.pixel_coordinates()
    gx, gy = np.meshgrid(x, x, indexing="ij")
    img = np.zeros((n, n), dtype=float)
    for e in ph.ellipses:
        ct, st = np.cos(e.theta), np.sin(e.theta)
        dx = gx - e.center[0]
        dy = gy - e.center[1]
        a, b = e.semi_axes
        inside = ((dx * ct + dy * st) / a) ** 2 + ((dy * ct - dx * st) / b) ** 2 <= 1.0
        img[inside] += e.amplitude
    return ImageGrid(spec=spec, pixels=img.astype(np.complex128))


@dataclass(frozen=True)
class SampleSet:
    """Complex measurements along a trajectory plus noise metadata."""

    trajectory: Trajectory
    b: np.ndarray
    isnr_db: float | None = None
    seed: int | None = None

    def __post_init__(self):
        vec = check_samples(self.b, m=self.trajectory.num_samples)
        vec = vec.copy()
        vec.flags.writeable = False
        object.__setattr__(self, "b", vec)

    @property
    def num_samples(self):
        return self.b.size


def add_noise(samples: SampleSet, isnr_db, seed):
    """Add complex white Gaussian noise calibrated to the target ISNR.

    The noise standard deviation per real channel is chosen so that
    ``10*log10(mean|b|^2 / (2*sigma^2)) = isnr_db``, i.e. the ISNR
    compares mean sample power against total complex noise power.
    ``isnr_db = inf`` returns the samples unchanged.
    """
    if samples.num_samples == 0:
        raise ValidationError("cannot add noise to an empty sample set")
    if samples.isnr_db is not None:
        raise ValidationError("sample set already carries noise")
    isnr_db = float(isnr_db)
    if np.isinf(isnr_db) and isnr_db > 0:
        return SampleSet(samples.trajectory, samples.b, isnr_db=None, seed=seed)
    if not np.isfinite(isnr_db):
        raise ValidationError(f"isnr_db must be finite or +inf, got {isnr_db}")
    power = float(np.mean(np.abs(samples.b) ** 2))
    sigma_n = np.sqrt(power / (2.0 * 10.0 ** (isnr_db / 10.0)))
    rng = np.random.default_rng(seed)
    noise = sigma_n * (rng.standard_normal(samples.num_samples)
                       + 1j * rng.standard_normal(samples.num_samples))
    return SampleSet(samples.trajectory, samples.b + noise, isnr_db=isnr_db, seed=seed)
