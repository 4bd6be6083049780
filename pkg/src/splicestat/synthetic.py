"""Synthetic authentic/spliced image generation for benchmarks and demos.

Authentic images are Gaussian-smoothed white noise with a per-image blur
sigma. Spliced images take one such image and paste a square patch from
an independently generated image with a clearly different sigma, which
perturbs both the AC coefficient statistics and the wavelet boundary
energies the detector keys on.

Images whose blur sigma is below the texture/smooth split count as
"texture" content, so each sample also gets one of the five content
categories.
"""

from __future__ import annotations

import numpy as np

from .image_pipeline import GrayImage, gaussian_filter

TEXTURE_SMOOTH_SPLIT = 1.5
_SIGMA_RANGE = (0.5, 3.0)
_MIN_SIGMA_GAP = 0.6


def _noise_image(rng: np.random.Generator, size: int, sigma: float) -> GrayImage:
    base = np.clip(rng.normal(128.0, 45.0, (size, size)), 0.0, 255.0)
    return gaussian_filter(GrayImage(base), sigma)


def _draw_sigma(rng: np.random.Generator) -> float:
    return float(rng.uniform(*_SIGMA_RANGE))


def _surface(sigma: float) -> str:
    return "texture" if sigma < TEXTURE_SMOOTH_SPLIT else "smooth"


def make_authentic_image(rng: np.random.Generator, size: int = 128):
    """Returns (GrayImage, category)."""
    sigma = _draw_sigma(rng)
    return _noise_image(rng, size, sigma), f"uniform-{_surface(sigma)}"


def make_spliced_image(rng: np.random.Generator, size: int = 128, patch: int = 48):
    """Returns (GrayImage, category); the patch donor has a different sigma."""
    sigma_base = _draw_sigma(rng)
    sigma_patch = _draw_sigma(rng)
    while abs(sigma_patch - sigma_base) < _MIN_SIGMA_GAP:
        sigma_patch = _draw_sigma(rng)
    base = _noise_image(rng, size, sigma_base)
    donor = _noise_image(rng, size, sigma_patch)
    y = int(rng.integers(0, size - patch + 1))
    x = int(rng.integers(0, size - patch + 1))
    pixels = base.pixels.copy()
    pixels[y : y + patch, x : x + patch] = donor.pixels[y : y + patch, x : x + patch]
    surfaces = sorted((_surface(sigma_base), _surface(sigma_patch)), reverse=True)
    return GrayImage(pixels), "-".join(surfaces)


def make_benchmark_dataset(
    n_authentic: int = 200,
    n_spliced: int = 200,
    size: int = 128,
    patch: int = 48,
    seed: int = 0,
):
    """Deterministic list of (GrayImage, label, category) samples."""
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(n_authentic):
        img, category = make_authentic_image(rng, size)
        samples.append((img, "authentic", category))
    for _ in range(n_spliced):
        img, category = make_spliced_image(rng, size, patch)
        samples.append((img, "spliced", category))
    return samples
