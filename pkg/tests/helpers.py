"""Independent oracle implementations shared by the tests.

These deliberately avoid the production code paths: the B-spline oracle
uses repeated numerical convolution of the unit rectangle, the 1D DFT
oracle is the direct O(n^2) sum, and the raster transform oracle
evaluates the image-domain Riemann sum at arbitrary k-space points.
"""

import numpy as np


def _bspline_conv_grid(degree, t, step):
    half_support = (degree + 1) / 2.0
    axis = np.arange(-half_support - 1, half_support + 1 + step, step)
    rect = ((np.abs(axis) < 0.5).astype(float)
            + 0.5 * (np.abs(axis) == 0.5))
    out = rect.copy()
    for _ in range(degree):
        out = np.convolve(out, rect, mode="same") * step
    return np.interp(np.asarray(t, dtype=float), axis, out, left=0.0, right=0.0)


def bspline_by_convolution(degree, t, step=1 / 4096.0):
    """(degree+1)-fold self-convolution of the unit rectangle on a fine
    grid, Richardson-extrapolated over the step (the leading error of
    the sampled convolution is linear in the step at the kink points)."""
    coarse = _bspline_conv_grid(degree, t, step)
    fine = _bspline_conv_grid(degree, t, step / 2.0)
    return 2.0 * fine - coarse


def dft_direct(x):
    """Centered forward DFT by direct summation (1D)."""
    x = np.asarray(x)
    n = x.size
    idx = np.arange(-n // 2, n // 2)
    kernel = np.exp(-2j * np.pi * np.outer(idx, idx) / n)
    return kernel @ x


def raster_transform(image, points):
    """Continuous-transform oracle: Riemann sum of the rasterized image
    at arbitrary k-space points (separable evaluation)."""
    image = np.asarray(image)
    n = image.shape[0]
    x = np.arange(-n // 2, n // 2) / n
    out = np.empty(len(points), dtype=complex)
    for i, (kx, ky) in enumerate(np.asarray(points, dtype=float)):
        vx = np.exp(-2j * np.pi * kx * x)
        vy = np.exp(-2j * np.pi * ky * x)
        out[i] = vx @ image @ vy / n**2
    return out


def circular_convolve_centered(a, kernel):
    """Circular convolution on the centered index set (any dim)."""
    a = np.asarray(a)
    kernel = np.asarray(kernel)
    n = a.shape[0]
    out = np.zeros_like(a, dtype=complex)
    if a.ndim == 1:
        for shift in range(n):
            out += kernel[shift] * np.roll(a, shift - n // 2)
    else:
        for s0 in range(n):
            for s1 in range(n):
                out += kernel[s0, s1] * np.roll(
                    np.roll(a, s0 - n // 2, axis=0), s1 - n // 2, axis=1
                )
    return out
