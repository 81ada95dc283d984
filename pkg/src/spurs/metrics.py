"""Reconstruction quality measures: SNR and mean structural similarity.

Complex inputs are reduced to magnitude before comparison.  SNR is the
raw pixel-power ratio in dB with no hidden normalization; SSIM uses
Gaussian-weighted local moments (sigma = 1.5, 11 x 11 window) with the
standard stabilizing constants.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve

from .errors import ValidationError

__all__ = ["QualityReport", "snr", "mssim", "METRIC_COLUMNS", "METRICS_SCHEMA"]

METRICS_SCHEMA = "spurs-metrics-v1"
METRIC_COLUMNS = (
    "method",
    "m",
    "isnr_db",
    "degree",
    "sigma",
    "rho",
    "iterations",
    "snr_db",
    "mssim",
    "wall_ms",
    "nnz_lu",
)


@dataclass(frozen=True)
class QualityReport:
    snr_db: float
    mssim: float
    ssim_map: np.ndarray


def _magnitude(img):
    arr = img.pixels if hasattr(img, "pixels") else np.asarray(img)
    return np.abs(arr).astype(float)


def snr(reference, reconstruction):
    """``10 log10(mean(f^2) / mean((g - f)^2))`` on magnitudes, in dB.

    Returns ``inf`` when the images are identical.
    """
    f = _magnitude(reference)
    g = _magnitude(reconstruction)
    if f.shape != g.shape:
        raise ValidationError(f"image shapes differ: {f.shape} vs {g.shape}")
    err_power = float(np.mean((g - f) ** 2))
    if err_power == 0.0:
        return float("inf")
    return float(10.0 * np.log10(np.mean(f**2) / err_power))


def _gaussian_window(sigma=1.5, size=11):
    half = size // 2
    x = np.arange(-half, half + 1, dtype=float)
    g1 = np.exp(-(x**2) / (2 * sigma**2))
    win = np.outer(g1, g1)
    return win / win.sum()


def mssim(reference, reconstruction, window_sigma=1.5, window_size=11):
    """Mean SSIM and the per-pixel SSIM map.

    Local means, variances, and covariance are Gaussian-weighted; the
    stabilizers are ``c1 = (0.01 L)^2`` and ``c2 = (0.03 L)^2`` with
    ``L`` the joint dynamic range of the two images (symmetric in the
    arguments; fallback 1 when both are constant).  The mean runs over
    the whole map; borders use reflected padding.
    """
    f = _magnitude(reference)
    g = _magnitude(reconstruction)
    if f.shape != g.shape:
        raise ValidationError(f"image shapes differ: {f.shape} vs {g.shape}")
    if f.ndim != 2:
        raise ValidationError("mssim expects 2D images")
    data_range = float(max(f.max(), g.max()) - min(f.min(), g.min()))
    if data_range == 0.0:
        data_range = 1.0
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2

    win = _gaussian_window(window_sigma, window_size)
    smooth = lambda arr: convolve(arr, win, mode="reflect")
    mu_f = smooth(f)
    mu_g = smooth(g)
    var_f = smooth(f * f) - mu_f**2
    var_g = smooth(g * g) - mu_g**2
    cov = smooth(f * g) - mu_f * mu_g

    ssim_map = ((2 * mu_f * mu_g + c1) * (2 * cov + c2)) / (
        (mu_f**2 + mu_g**2 + c1) * (var_f + var_g + c2)
    )
    return float(ssim_map.mean()), ssim_map


def quality_report(reference, reconstruction):
    value, ssim_map = mssim(reference, reconstruction)
    return QualityReport(snr_db=snr(reference, reconstruction), mssim=value, ssim_map=ssim_map)
