"""Input validation helpers.

Small checkers used at public API boundaries so that estimator and CLI
entry points fail early with uniform error messages.
"""

import numpy as np

from .errors import ValidationError


def check_points(points, dim=None):
    """Coerce trajectory coordinates to a finite float64 (M, dim) array."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValidationError(f"expected an (M, dim) coordinate array, got shape {pts.shape}")
    if pts.shape[1] not in (1, 2):
        raise ValidationError(f"only 1D and 2D coordinates are supported, got dim={pts.shape[1]}")
    if dim is not None and pts.shape[1] != dim:
        raise ValidationError(f"expected dim={dim} coordinates, got dim={pts.shape[1]}")
    if not np.all(np.isfinite(pts)):
        raise ValidationError("coordinates contain non-finite values")
    return pts


def check_samples(b, m=None):
    """Coerce a measurement vector to complex128 of length M."""
    vec = np.asarray(b)
    if vec.ndim != 1 or vec.size < 1:
        raise ValidationError(f"expected a 1D sample vector, got shape {vec.shape}")
    if m is not None and vec.size != m:
        raise ValidationError(f"sample vector has length {vec.size}, expected {m}")
    if not np.all(np.isfinite(vec)):
        raise ValidationError("sample vector contains non-finite values")
    return vec.astype(np.complex128, copy=False)


def check_positive(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be positive and finite, got {value!r}")
    return value


def check_weights(weights, m):
    """Validate an optional diagonal weight vector (all entries > 0)."""
    if weights is None:
        return None
    w = np.asarray(weights, dtype=float)
    if w.shape != (m,):
        raise ValidationError(f"weight vector has shape {w.shape}, expected ({m},)")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValidationError("weights must be finite and strictly positive")
    return w
