"""Estimator-style front end.

`SpursReconstructor` and `GriddingReconstructor` expose the pipelines
through the scikit-learn fit/transform convention: ``fit`` takes the
(M, dim) sample coordinates and performs all trajectory-dependent
preparation, ``transform`` maps measurement vectors to images.  Both
inherit ``get_params`` / ``set_params``, so they compose with
scikit-learn model-selection tooling.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .engine import ReconConfig, plan_offline, reconstruct_iterative, reconstruct_once
from .errors import ValidationError
from .gridding import KaiserBesselSpec, grid_reconstruct
from .trajectories import Trajectory
from .validation import check_points

__all__ = ["SpursReconstructor", "GriddingReconstructor"]


def _as_sample_matrix(data, m):
    arr = np.asarray(data, dtype=complex)
    if arr.ndim == 1:
        if arr.shape[0] != m:
            raise ValidationError(f"expected {m} samples, got {arr.shape[0]}")
        return arr[None, :], True
    if arr.ndim != 2 or arr.shape[1] != m:
        raise ValidationError(f"expected shape (n_sets, {m}), got {arr.shape}")
    return arr, False


class SpursReconstructor(BaseEstimator, TransformerMixin):
    """Two-projection resampling reconstruction as an estimator.

    Parameters
    ----------
    n : int
        Base grid size per dimension (even).
    degree : int
        Interpolation kernel degree (support degree + 1).
    oversampling : float
        Grid oversampling factor; ``oversampling * n`` must be even.
    rho : float or None
        Regularizer; None picks the data-scaled default.
    weights : array or None
        Square-root sample weights (length M), None for identity.
    iterations : int
        1 reproduces the direct method; larger values enable the
        residual-feedback refinement.
    tol : float
        Relative residual stopping threshold for the iterative scheme.
    """

    def __init__(self, n=128, degree=3, oversampling=2.0, rho=None, weights=None,
                 iterations=1, tol=1e-6):
        self.n = n
        self.degree = degree
        self.oversampling = oversampling
        self.rho = rho
        self.weights = weights
        self.iterations = iterations
        self.tol = tol

    def _config(self):
        return ReconConfig(
            n=self.n,
            degree=self.degree,
            sigma=self.oversampling,
            rho=self.rho,
            gamma_bar=self.weights,
            max_iter=self.iterations,
            tol=self.tol,
        )

    def fit(self, X, y=None):
        """Run the offline phase for the sample coordinates in X."""
        pts = check_points(X)
        traj = Trajectory(pts, label="estimator")
        self.plan_ = plan_offline(traj, self._config())
        return self

    def transform(self, X):
        """Reconstruct images from measurement vectors.

        X is one complex vector of length M or a stack (n_sets, M);
        returns matching image arrays.
        """
        if not hasattr(self, "plan_"):
            raise ValidationError("estimator is not fitted; call fit(coordinates) first")
        data, single = _as_sample_matrix(X, self.plan_.num_samples)
        images = []
        for row in data:
            if self.iterations > 1:
                _, image, _ = reconstruct_iterative(self.plan_, row, self._config())
            else:
                _, image = reconstruct_once(self.plan_, row)
            images.append(image.pixels)
        out = np.stack(images)
        return out[0] if single else out

    def predict(self, X):
        return self.transform(X)


class GriddingReconstructor(BaseEstimator, TransformerMixin):
    """Convolutional gridding baseline with the same estimator surface."""

    def __init__(self, n=128, width=12.0, beta=None, oversampling=2.0, density="auto"):
        self.n = n
        self.width = width
        self.beta = beta
        self.oversampling = oversampling
        self.density = density

    def fit(self, X, y=None):
        pts = check_points(X)
        label = "radial" if self.density == "radial" else ""
        self.trajectory_ = Trajectory(pts, label=label)
        self.window_ = KaiserBesselSpec(width=self.width, beta=self.beta,
                                        sigma=self.oversampling)
        return self

    def transform(self, X):
        if not hasattr(self, "trajectory_"):
            raise ValidationError("estimator is not fitted; call fit(coordinates) first")
        data, single = _as_sample_matrix(X, self.trajectory_.num_samples)
        images = [
            grid_reconstruct(self.trajectory_, row, self.n, self.window_,
                             density=self.density).pixels
            for row in data
        ]
        out = np.stack(images)
        return out[0] if single else out

    def predict(self, X):
        return self.transform(X)
