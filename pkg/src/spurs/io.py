"""File formats: raw arrays with JSON sidecars, 16-bit PGM previews,
sample sets, and the versioned plan container.

Raw arrays are little-endian IEEE-754 float64; complex data is stored
as interleaved (re, im) pairs, row-major, with a JSON sidecar recording
dtype ("c128" or "f64"), shape, and the centered-indexing offset.  The
plan container is a binary file with magic ``SPURSFAC1`` holding the
grid/kernel/regularization metadata, the interpolation matrix, the
triangular factors and permutations, the correction filter, and a
trailing SHA-256 checksum that is verified on load.
"""

import hashlib
import json
import struct

import numpy as np
import scipy.sparse as sp

from .engine import OfflinePlan
from .errors import ValidationError
from .grid import GridSpec
from .kernels import KernelSpec
from .phantom import SampleSet
from .solver import Factorization, assemble_tableau
from .trajectories import Trajectory

__all__ = [
    "sidecar_path",
    "write_array",
    "read_array",
    "write_pgm",
    "write_samples",
    "read_samples",
    "write_plan",
    "read_plan",
    "file_sha256",
    "write_json",
    "read_json",
]

PLAN_MAGIC = b"SPURSFAC1"
PLAN_VERSION = 1


def sidecar_path(path):
    path = str(path)
    return (path[: -len(".raw")] if path.endswith(".raw") else path) + ".json"


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_array(path, arr, center_offset=None, extra=None):
    """Write an array in the raw + JSON-sidecar format."""
    path = str(path)
    arr = np.asarray(arr)
    if np.iscomplexobj(arr):
        dtype = "c128"
        payload = np.ascontiguousarray(arr, dtype="<c16")
    else:
        dtype = "f64"
        payload = np.ascontiguousarray(arr, dtype="<f8")
    if center_offset is None:
        center_offset = [s // 2 for s in arr.shape]
    sidecar = {
        "dtype": dtype,
        "shape": list(arr.shape),
        "center_offset": list(center_offset),
    }
    if extra:
        sidecar.update(extra)
    with open(path, "wb") as fh:
        fh.write(payload.tobytes())
    write_json(sidecar_path(path), sidecar)


def read_array(path):
    """Read a raw + sidecar array; returns (array, sidecar dict)."""
    path = str(path)
    sidecar = read_json(sidecar_path(path))
    shape = tuple(sidecar["shape"])
    dtype = "<c16" if sidecar["dtype"] == "c128" else "<f8"
    data = np.fromfile(path, dtype=dtype)
    expected = int(np.prod(shape)) if shape else 1
    if data.size != expected:
        raise ValidationError(
            f"{path}: payload holds {data.size} values, sidecar declares {expected}"
        )
    return data.reshape(shape), sidecar


def write_pgm(path, image, sidecar_extra=None):
    """Write a 16-bit binary PGM of the image magnitude (min-max scaled);
    the scale is recorded in a JSON sidecar."""
    path = str(path)
    arr = image.pixels if hasattr(image, "pixels") else np.asarray(image)
    mag = np.abs(arr).astype(float)
    if mag.ndim == 1:
        mag = mag[None, :]
    lo, hi = float(mag.min()), float(mag.max())
    scaled = np.zeros_like(mag) if hi == lo else (mag - lo) / (hi - lo) * 65535.0
    pixels = np.round(scaled).astype(">u2")
    header = f"P5\n{mag.shape[1]} {mag.shape[0]}\n65535\n".encode()
    with open(path, "wb") as fh:
        fh.write(header + pixels.tobytes())
    sidecar = {"format": "pgm16", "min": lo, "max": hi}
    if sidecar_extra:
        sidecar.update(sidecar_extra)
    write_json(path + ".json", sidecar)


def file_sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_samples(path, samples: SampleSet, trajectory_sha256=None):
    """Write a sample set as a raw complex vector plus noise metadata."""
    extra = {
        "kind": "samples",
        "isnr_db": samples.isnr_db,
        "seed": samples.seed,
        "trajectory_sha256": trajectory_sha256,
    }
    write_array(path, samples.b, center_offset=[0], extra=extra)


def read_samples(path, trajectory: Trajectory, expect_sha256=None):
    """Read a sample set; optionally verify the recorded trajectory hash."""
    data, sidecar = read_array(path)
    recorded = sidecar.get("trajectory_sha256")
    if expect_sha256 is not None and recorded is not None and recorded != expect_sha256:
        raise ValidationError(
            f"{path}: sample set was simulated for a different trajectory "
            f"({recorded[:12]}... != {expect_sha256[:12]}...)"
        )
    return SampleSet(
        trajectory=trajectory,
        b=data,
        isnr_db=sidecar.get("isnr_db"),
        seed=sidecar.get("seed"),
    ), sidecar


def _array_blocks(plan: OfflinePlan):
    phi = plan.phi.tocsr()
    fact = plan.factorization
    lower = fact.lower.tocsr()
    upper = fact.upper.tocsr()
    return [
        ("trajectory_points", np.ascontiguousarray(plan.trajectory.points, "<f8")),
        ("gamma_bar", np.ascontiguousarray(plan.gamma_bar, "<f8")),
        ("filter_taps", np.ascontiguousarray(plan.filter_taps, "<f8")),
        ("row_scale", np.ascontiguousarray(fact.row_scale, "<f8")),
        ("perm_r", np.ascontiguousarray(fact.perm_r, "<u8")),
        ("perm_c", np.ascontiguousarray(fact.perm_c, "<u8")),
        ("phi_indptr", np.ascontiguousarray(phi.indptr, "<u8")),
        ("phi_indices", np.ascontiguousarray(phi.indices, "<u8")),
        ("phi_data", np.ascontiguousarray(phi.data, "<f8")),
        ("lower_indptr", np.ascontiguousarray(lower.indptr, "<u8")),
        ("lower_indices", np.ascontiguousarray(lower.indices, "<u8")),
        ("lower_data", np.ascontiguousarray(lower.data, "<f8")),
        ("upper_indptr", np.ascontiguousarray(upper.indptr, "<u8")),
        ("upper_indices", np.ascontiguousarray(upper.indices, "<u8")),
        ("upper_data", np.ascontiguousarray(upper.data, "<f8")),
    ]


def write_plan(path, plan: OfflinePlan, trajectory_sha256=None):
    """Serialize an offline plan to the SPURSFAC1 container."""
    blocks = _array_blocks(plan)
    header = {
        "format": PLAN_MAGIC.decode(),
        "version": PLAN_VERSION,
        "grid": {"dim": plan.grid.dim, "n": plan.grid.n, "sigma": plan.grid.sigma},
        "kernel": {"degree": plan.kernel.degree},
        "rho": plan.rho,
        "num_samples": int(plan.phi.shape[0]),
        "num_grid": int(plan.phi.shape[1]),
        "trajectory_sha256": trajectory_sha256,
        "trajectory_label": plan.trajectory.label,
        "metadata": plan.metadata,
        "arrays": [
            {"name": name, "dtype": str(arr.dtype), "shape": list(arr.shape)}
            for name, arr in blocks
        ],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode()
    digest = hashlib.sha256()
    with open(path, "wb") as fh:
        def emit(data):
            digest.update(data)
            fh.write(data)

        emit(PLAN_MAGIC)
        emit(struct.pack("<I", PLAN_VERSION))
        emit(struct.pack("<Q", len(header_bytes)))
        emit(header_bytes)
        for _, arr in blocks:
            emit(arr.tobytes())
        fh.write(digest.digest())


def read_plan(path):
    """Load a SPURSFAC1 plan; verifies the checksum and rebuilds the
    factorization wrapper without re-running the offline phase."""
    path = str(path)
    with open(path, "rb") as fh:
        payload = fh.read()
    if len(payload) < len(PLAN_MAGIC) + 4 + 8 + 32:
        raise ValidationError(f"{path}: not a plan file (truncated)")
    if payload[: len(PLAN_MAGIC)] != PLAN_MAGIC:
        raise ValidationError(f"{path}: bad magic, not a {PLAN_MAGIC.decode()} file")
    body, checksum = payload[:-32], payload[-32:]
    if hashlib.sha256(body).digest() != checksum:
        raise ValidationError(f"{path}: checksum mismatch, file is corrupted")
    off = len(PLAN_MAGIC)
    (version,) = struct.unpack_from("<I", body, off)
    off += 4
    if version != PLAN_VERSION:
        raise ValidationError(f"{path}: unsupported plan version {version}")
    (header_len,) = struct.unpack_from("<Q", body, off)
    off += 8
    header = json.loads(body[off : off + header_len].decode())
    off += header_len

    arrays = {}
    for entry in header["arrays"]:
        dtype = np.dtype(entry["dtype"])
        count = int(np.prod(entry["shape"])) if entry["shape"] else 1
        nbytes = count * dtype.itemsize
        arrays[entry["name"]] = np.frombuffer(
            body, dtype=dtype, count=count, offset=off
        ).reshape(entry["shape"])
        off += nbytes

    grid = GridSpec(**header["grid"])
    kernel = KernelSpec(**header["kernel"])
    m, g = header["num_samples"], header["num_grid"]
    traj = Trajectory(arrays["trajectory_points"], label=header.get("trajectory_label", ""))
    phi = sp.csr_matrix(
        (arrays["phi_data"], arrays["phi_indices"].astype(np.int64),
         arrays["phi_indptr"].astype(np.int64)),
        shape=(m, g),
    )
    lower = sp.csr_matrix(
        (arrays["lower_data"], arrays["lower_indices"].astype(np.int64),
         arrays["lower_indptr"].astype(np.int64)),
        shape=(m + g, m + g),
    )
    upper = sp.csr_matrix(
        (arrays["upper_data"], arrays["upper_indices"].astype(np.int64),
         arrays["upper_indptr"].astype(np.int64)),
        shape=(m + g, m + g),
    )
    gamma_bar = arrays["gamma_bar"].astype(float)
    tableau = assemble_tableau(phi, gamma_bar, header["rho"])
    fact = Factorization(
        lower=lower,
        upper=upper,
        perm_r=arrays["perm_r"].astype(np.int64),
        perm_c=arrays["perm_c"].astype(np.int64),
        row_scale=arrays["row_scale"].astype(float),
        tableau=tableau,
    )
    return OfflinePlan(
        grid=grid,
        kernel=kernel,
        trajectory=traj,
        phi=phi,
        factorization=fact,
        filter_taps=arrays["filter_taps"].astype(float),
        gamma_bar=gamma_bar,
        rho=float(header["rho"]),
        metadata=header.get("metadata", {}),
    ), header
