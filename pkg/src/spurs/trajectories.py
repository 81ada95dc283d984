"""Non-Cartesian sampling pattern generators and trajectory I/O.

Coordinates are in k-space units of 1/FOV.  Column d of the point array
corresponds to axis d of the reconstruction grid; for 2D the columns are
(kx, ky).
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import ValidationError
from .validation import check_points

__all__ = [
    "Trajectory",
    "radial",
    "spiral",
    "covering_radius",
    "save_trajectory",
    "load_trajectory",
]


@dataclass(frozen=True)
class Trajectory:
    """A finite set of k-space sample coordinates.

    points : (M, dim) float64 array, label : generator name + parameters.
    """

    points: np.ndarray
    label: str = ""

    def __post_init__(self):
        pts = check_points(self.points)
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def num_samples(self):
        return self.points.shape[0]


def radial(n, n_spokes, n_bins):
    """Radial spoke trajectory.

    Spoke s has angle ``pi*s/n_spokes`` (s = 0..n_spokes-1); bin r along
    a spoke sits at signed radius ``n*(r/n_bins - 0.5)`` (r = 0..n_bins-1),
    so each spoke crosses the k-space center and M = n_spokes * n_bins.
    """
    if n_spokes < 1 or n_bins < 2:
        raise ValidationError("radial requires n_spokes >= 1 and n_bins >= 2")
    s = np.arange(int(n_spokes))
    r = np.arange(int(n_bins))
    omega = np.pi * s / n_spokes
    radius = n * (r / n_bins - 0.5)
    kx = np.outer(radius, np.cos(omega)).T.ravel()
    ky = np.outer(radius, np.sin(omega)).T.ravel()
    return Trajectory(
        np.stack([kx, ky], axis=1),
        label=f"radial(n={n},spokes={n_spokes},bins={n_bins})",
    )


def spiral(n, m):
    """Single-arm Archimedean constant-velocity spiral with M points.

    Point j sits at radius ``(n/2)*sqrt(j/M)`` and angle
    ``2*pi*sqrt(j/pi)``, which makes the sampling density approximately
    uniform over the covered disk.
    """
    if m < 1:
        raise ValidationError("spiral requires m >= 1")
    j = np.arange(int(m))
    omega = 2 * np.pi * np.sqrt(j / np.pi)
    radius = (n / 2.0) * np.sqrt(j / m)
    return Trajectory(
        np.stack([radius * np.cos(omega), radius * np.sin(omega)], axis=1),
        label=f"spiral(n={n},m={m})",
    )


def covering_radius(traj: Trajectory, extent):
    """Approximate covering radius of the trajectory over the k-extent.

    Probes a regular grid of spacing delta/4 spanning [-extent/2,
    extent/2] (endpoints included) and returns the maximum distance from
    a probe point to its nearest trajectory sample.  Diagnostic only;
    resolution is limited by the probe spacing.
    """
    step = 0.25
    axis = np.arange(-extent / 2.0, extent / 2.0 + step / 2, step)
    if traj.dim == 1:
        probes = axis[:, None]
    else:
        gx, gy = np.meshgrid(axis, axis, indexing="ij")
        probes = np.stack([gx.ravel(), gy.ravel()], axis=1)
    tree = cKDTree(traj.points)
    dist, _ = tree.query(probes, k=1)
    return float(dist.max())


def _format_value(x):
    return format(float(x), ".17g")


def save_trajectory(traj: Trajectory, path):
    """Write a trajectory file.

    Paths ending in ``.csv`` use the text format (header ``kx[,ky]``,
    one point per line, 17 significant digits); anything else uses the
    repo-wide raw array format with a JSON sidecar.  Both round-trip
    float64 coordinates exactly.
    """
    path = str(path)
    if not path.endswith(".csv"):
        from .io import write_array

        write_array(path, traj.points, center_offset=[0, 0],
                    extra={"kind": "trajectory", "label": traj.label})
        return
    header = ",".join(["kx", "ky"][: traj.dim])
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in traj.points:
            fh.write(",".join(_format_value(v) for v in row) + "\n")


def load_trajectory(path):
    """Read a trajectory written by `save_trajectory` (CSV or raw)."""
    path = str(path)
    if not path.endswith(".csv"):
        from .io import read_array

        data, sidecar = read_array(path)
        if sidecar.get("kind") != "trajectory" or np.iscomplexobj(data):
            raise ValidationError(f"{path} is not a trajectory file")
        return Trajectory(data, label=sidecar.get("label", f"file({path})"))
    with open(path) as fh:
        header = fh.readline().strip()
        if header == "kx":
            dim = 1
        elif header == "kx,ky":
            dim = 2
        else:
            raise ValidationError(f"unrecognized trajectory header {header!r} in {path}")
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ValidationError(f"malformed trajectory file {path}: {exc}") from exc
    if data.size == 0 or data.shape[1] != dim:
        raise ValidationError(f"trajectory file {path} does not match its header")
    if not np.all(np.isfinite(data)):
        raise ValidationError(f"trajectory file {path} contains non-finite coordinates")
    return Trajectory(data, label=f"file({path})")
