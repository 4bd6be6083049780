"""Grayscale image container and deterministic preprocessing operations.

All operations are pure: they never modify their inputs and return new
``GrayImage`` instances. Pixel values are float64 luminance in [0, 255].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InvalidInput

# Rec.601 luma weights, the classical YCbCr convention.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class GrayImage:
    """A 2D luminance image.

    ``pixels`` is a read-only float64 array of shape (height, width) with
    every value finite and in [0, 255].
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidInput("image must be a nonempty 2D array")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("image contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 255.0:
            raise InvalidInput("pixel values must lie in [0, 255]")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class PreprocessConfig:
    """Preprocessing knobs: optional resize, median filter, Gaussian filter.

    ``resize_to`` is (width, height); the median window side is
    ``2 * median_radius + 1``.
    """

    resize_to: tuple[int, int] | None = None
    median_radius: int | None = None
    gaussian_sigma: float | None = None

    def __post_init__(self):
        if self.resize_to is not None:
            w, h = self.resize_to
            if w < 2 or h < 2:
                raise InvalidInput("resize dimensions must be >= 2 in each axis")
        if self.median_radius is not None and self.median_radius < 1:
            raise InvalidInput("median_radius must be >= 1")
        if self.gaussian_sigma is not None and not self.gaussian_sigma > 0:
            raise InvalidInput("gaussian_sigma must be > 0")


def to_luminance(rgb) -> GrayImage:
    """Convert an interleaved 8-bit RGB raster (H, W, 3) to luminance.

    Y = 0.299 R + 0.587 G + 0.114 B per pixel, clamped to [0, 255].
    """
    arr = np.asarray(rgb, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInput("expected a nonempty (H, W, 3) RGB raster")
    if not np.all(np.isfinite(arr)) or arr.min() < 0 or arr.max() > 255:
        raise InvalidInput("RGB channel values must lie in [0, 255]")
    wr, wg, wb = LUMA_WEIGHTS
    y = wr * arr[:, :, 0] + wg * arr[:, :, 1] + wb * arr[:, :, 2]
    return GrayImage(np.clip(y, 0.0, 255.0))


def resize_bilinear(img: GrayImage, out_w: int, out_h: int) -> GrayImage:
    """Bilinear resize with align-corners sampling.

    Output pixel (i, j) samples the source at
    (i * (H-1) / (out_h-1), j * (W-1) / (out_w-1)), so corner pixels are
    preserved exactly.
    """
    if out_w < 2 or out_h < 2:
        raise InvalidInput("output dimensions must be >= 2")
    src = img.pixels
    in_h, in_w = src.shape
    ys = np.arange(out_h, dtype=np.float64) * ((in_h - 1) / (out_h - 1))
    xs = np.arange(out_w, dtype=np.float64) * ((in_w - 1) / (out_w - 1))
    y0 = np.minimum(ys.astype(np.int64), in_h - 1)
    x0 = np.minimum(xs.astype(np.int64), in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    top = src[np.ix_(y0, x0)] * (1 - fx) + src[np.ix_(y0, x1)] * fx
    bot = src[np.ix_(y1, x0)] * (1 - fx) + src[np.ix_(y1, x1)] * fx
    return GrayImage(top * (1 - fy) + bot * fy)


def median_filter(img: GrayImage, radius: int) -> GrayImage:
    """Median filter with a (2r+1) x (2r+1) window and edge replication.

    The window has an odd number of elements, so the median is always an
    element of the window.
    """
    if radius < 1:
        raise InvalidInput("radius must be >= 1")
    side = 2 * radius + 1
    if img.height < side or img.width < side:
        raise InvalidInput(
            f"image {img.width}x{img.height} is smaller than the {side}x{side} window"
        )
    padded = np.pad(img.pixels, radius, mode="edge")
    windows = sliding_window_view(padded, (side, side))
    return GrayImage(np.median(windows, axis=(2, 3)))


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1D Gaussian kernel truncated at half-width ceil(3*sigma)."""
    if not sigma > 0:
        raise InvalidInput("sigma must be > 0")
    half = math.ceil(3.0 * sigma)
    k = np.arange(-half, half + 1, dtype=np.float64)
    w = np.exp(-(k * k) / (2.0 * sigma * sigma))
    return w / w.sum()


def _convolve_axis(arr: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    half = len(kernel) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (half, half)
    padded = np.pad(arr, pad, mode="edge")
    windows = sliding_window_view(padded, len(kernel), axis=axis)
    # kernel is symmetric, so correlation equals convolution
    return windows @ kernel


def gaussian_filter(img: GrayImage, sigma: float) -> GrayImage:
    """Separable Gaussian smoothing with edge replication at the borders."""
    kernel = gaussian_kernel(sigma)
    out = _convolve_axis(img.pixels, kernel, axis=1)
    out = _convolve_axis(out, kernel, axis=0)
    return GrayImage(np.clip(out, 0.0, 255.0))


def preprocess(img: GrayImage, cfg: PreprocessConfig | None = None) -> GrayImage:
    """Apply the configured steps in order: resize, median, Gaussian."""
    if cfg is None:
        return img
    out = img
    if cfg.resize_to is not None:
        w, h = cfg.resize_to
        out = resize_bilinear(out, w, h)
    if cfg.median_radius is not None:
        out = median_filter(out, cfg.median_radius)
    if cfg.gaussian_sigma is not None:
        out = gaussian_filter(out, cfg.gaussian_sigma)
    return out
