"""Block 2D DCT and multi-level orthonormal Haar wavelet decomposition.

Both transforms are orthonormal, so per-block (DCT) and whole-image
(Haar) energy is conserved exactly up to float rounding. That makes
Parseval checks and perfect-reconstruction checks meaningful tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidInput
from .image_pipeline import GrayImage

SQRT2 = np.sqrt(2.0)

# Detail subband orientations, in feature order. "horizontal" responds to
# horizontal edges (detail along the vertical axis), matching the usual
# wavelet-toolbox convention.
ORIENTATIONS = ("horizontal", "vertical", "diagonal")


@dataclass(frozen=True)
class BlockSpectrum:
    """DCT coefficients of one B x B block; coeffs[0, 0] is the DC term."""

    block_size: int
    coeffs: np.ndarray


@dataclass(frozen=True)
class BlockGrid:
    """DCT spectra of all full B x B tiles of an image, row-major.

    ``coeffs`` has shape (n_blocks, B, B). ``grid_shape`` is the tile
    layout (rows, cols); pixels beyond the last full tile are discarded.
    """

    block_size: int
    coeffs: np.ndarray
    grid_shape: tuple[int, int]

    @property
    def n_blocks(self) -> int:
        return self.coeffs.shape[0]

    def block(self, i: int) -> BlockSpectrum:
        return BlockSpectrum(self.block_size, self.coeffs[i])

    def dc_values(self) -> np.ndarray:
        """DC coefficient of every block, in block order."""
        return self.coeffs[:, 0, 0]

    def ac_values(self) -> np.ndarray:
        """All AC coefficients of all blocks, flattened."""
        flat = self.coeffs.reshape(self.n_blocks, -1)
        return flat[:, 1:].ravel()

    def ac_at(self, u: int, v: int) -> np.ndarray:
        """Coefficient at frequency (u, v) != (0, 0) of every block."""
        if u == 0 and v == 0:
            raise InvalidInput("(0, 0) is the DC position, not an AC position")
        return self.coeffs[:, u, v]


@dataclass(frozen=True)
class SubbandCoefficients:
    """Detail coefficients of one wavelet subband.

    ``level`` is 1-based; ``orientation`` is one of ORIENTATIONS;
    ``values`` is the 2D detail array for that subband.
    """

    level: int
    orientation: str
    values: np.ndarray

    @property
    def count(self) -> int:
        return self.values.size


@lru_cache(maxsize=8)
def dct_matrix(block_size: int) -> np.ndarray:
    """Orthonormal DCT-II basis matrix C with C @ C.T = I.

    C[k, n] = s_k * cos(pi * (2n + 1) * k / (2B)), s_0 = sqrt(1/B),
    s_k = sqrt(2/B) otherwise.
    """
    if block_size < 2:
        raise InvalidInput("block_size must be >= 2")
    b = block_size
    n = np.arange(b)
    k = n[:, None]
    c = np.cos(np.pi * (2 * n[None, :] + 1) * k / (2 * b))
    c *= np.sqrt(2.0 / b)
    c[0, :] = np.sqrt(1.0 / b)
    c.flags.writeable = False
    return c


def block_dct(img: GrayImage, block_size: int = 8) -> BlockGrid:
    """Tile the image into B x B blocks and DCT-transform each tile.

    Tiles are non-overlapping and ordered row-major; residual pixels
    beyond the last full tile are discarded.
    """
    if block_size < 2:
        raise InvalidInput("block_size must be >= 2")
    h, w = img.pixels.shape
    rows, cols = h // block_size, w // block_size
    if rows == 0 or cols == 0:
        raise InvalidInput(
            f"image {w}x{h} is smaller than one {block_size}x{block_size} block"
        )
    b = block_size
    tiles = img.pixels[: rows * b, : cols * b].reshape(rows, b, cols, b)
    blocks = tiles.transpose(0, 2, 1, 3).reshape(rows * cols, b, b)
    c = dct_matrix(b)
    coeffs = c @ blocks @ c.T
    return BlockGrid(block_size=b, coeffs=coeffs, grid_shape=(rows, cols))


def idct_block(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of the orthonormal block DCT; accepts (..., B, B)."""
    b = coeffs.shape[-1]
    if coeffs.shape[-2] != b:
        raise InvalidInput("coefficient blocks must be square")
    c = dct_matrix(b)
    return c.T @ coeffs @ c


def assemble_blocks(grid: BlockGrid) -> np.ndarray:
    """Inverse-transform a BlockGrid back into the tiled image region."""
    rows, cols = grid.grid_shape
    b = grid.block_size
    pixels = idct_block(grid.coeffs)
    return pixels.reshape(rows, cols, b, b).transpose(0, 2, 1, 3).reshape(
        rows * b, cols * b
    )


def haar_step_1d(values) -> tuple[np.ndarray, np.ndarray]:
    """One orthonormal Haar analysis step on a 1D signal of even length.

    Pairs (a, b) map to approximation (a + b)/sqrt(2) and detail
    (a - b)/sqrt(2).
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0 or arr.size % 2 != 0:
        raise InvalidInput("signal must be 1D with positive even length")
    return (arr[0::2] + arr[1::2]) / SQRT2, (arr[0::2] - arr[1::2]) / SQRT2


def _haar_level_2d(a: np.ndarray):
    lo = (a[:, 0::2] + a[:, 1::2]) / SQRT2
    hi = (a[:, 0::2] - a[:, 1::2]) / SQRT2
    ll = (lo[0::2] + lo[1::2]) / SQRT2
    lh = (lo[0::2] - lo[1::2]) / SQRT2
    hl = (hi[0::2] + hi[1::2]) / SQRT2
    hh = (hi[0::2] - hi[1::2]) / SQRT2
    # lh: detail along the vertical axis only -> horizontal edges
    return ll, lh, hl, hh


def _pad_to_multiple(pixels: np.ndarray, multiple: int) -> np.ndarray:
    h, w = pixels.shape
    ph = (-h) % multiple
    pw = (-w) % multiple
    if ph == 0 and pw == 0:
        return pixels
    return np.pad(pixels, ((0, ph), (0, pw)), mode="edge")


def haar_decompose(img: GrayImage, levels: int):
    """Full Haar analysis: (final approximation, list of detail subbands).

    The image is first edge-replicated up to the next multiple of
    2**levels in each axis, then decomposed level by level. Subbands are
    ordered level-major with orientations (horizontal, vertical,
    diagonal) inside each level.
    """
    if levels < 1:
        raise InvalidInput("levels must be >= 1")
    if levels > 30:
        raise InvalidInput("levels too large")
    approx = _pad_to_multiple(img.pixels.astype(np.float64), 2**levels)
    subbands = []
    for level in range(1, levels + 1):
        if approx.shape[0] < 2 or approx.shape[1] < 2:
            raise InvalidInput(f"subband at level {level} would be empty")
        approx, lh, hl, hh = _haar_level_2d(approx)
        subbands.append(SubbandCoefficients(level, "horizontal", lh))
        subbands.append(SubbandCoefficients(level, "vertical", hl))
        subbands.append(SubbandCoefficients(level, "diagonal", hh))
    return approx, subbands


def dwt_haar(img: GrayImage, levels: int = 3) -> list[SubbandCoefficients]:
    """Detail subbands of a ``levels``-deep orthonormal Haar decomposition."""
    _, subbands = haar_decompose(img, levels)
    return subbands


def haar_reconstruct(approx: np.ndarray, subbands) -> np.ndarray:
    """Invert haar_decompose, returning the (padded) pixel array."""
    by_level: dict[int, dict[str, np.ndarray]] = {}
    for sb in subbands:
        by_level.setdefault(sb.level, {})[sb.orientation] = sb.values
    out = np.asarray(approx, dtype=np.float64)
    for level in sorted(by_level, reverse=True):
        bands = by_level[level]
        lh, hl, hh = (bands[o] for o in ORIENTATIONS)
        lo = np.empty((out.shape[0] * 2, out.shape[1]))
        hi = np.empty_like(lo)
        lo[0::2], lo[1::2] = (out + lh) / SQRT2, (out - lh) / SQRT2
        hi[0::2], hi[1::2] = (hl + hh) / SQRT2, (hl - hh) / SQRT2
        out = np.empty((lo.shape[0], lo.shape[1] * 2))
        out[:, 0::2], out[:, 1::2] = (lo + hi) / SQRT2, (lo - hi) / SQRT2
    return out
