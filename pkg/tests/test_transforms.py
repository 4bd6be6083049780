import numpy as np
import pytest

from splicestat.errors import InvalidInput
from splicestat.image_pipeline import GrayImage
from splicestat.transforms import (
    ORIENTATIONS,
    assemble_blocks,
    block_dct,
    dct_matrix,
    dwt_haar,
    haar_decompose,
    haar_reconstruct,
    haar_step_1d,
    idct_block,
)

from helpers import random_image


class TestBlockDct:
    def test_constant_block_dc(self):
        grid = block_dct(GrayImage(np.full((8, 8), 10.0)), 8)
        assert grid.n_blocks == 1
        coeffs = grid.block(0).coeffs
        assert coeffs[0, 0] == pytest.approx(80.0, abs=1e-12)
        ac = coeffs.copy()
        ac[0, 0] = 0.0
        np.testing.assert_allclose(ac, 0.0, atol=1e-12)

    def test_two_by_two_dc(self):
        # direct evaluation of the 2x2 orthonormal basis sum: (1/2) * 1
        grid = block_dct(GrayImage(np.array([[1.0, 0.0], [0.0, 0.0]])), 2)
        assert grid.block(0).coeffs[0, 0] == pytest.approx(0.5, abs=1e-15)

    def test_parseval_per_block(self):
        rng = np.random.default_rng(0)
        img = random_image(rng, 24, 16)
        grid = block_dct(img, 8)
        tiles = img.pixels.reshape(3, 8, 2, 8).transpose(0, 2, 1, 3).reshape(6, 8, 8)
        for i in range(grid.n_blocks):
            spectral = np.sum(grid.block(i).coeffs ** 2)
            spatial = np.sum(tiles[i] ** 2)
            assert abs(spectral - spatial) <= 1e-9 * spatial

    def test_inverse_reconstructs(self):
        rng = np.random.default_rng(1)
        img = random_image(rng, 16, 16)
        grid = block_dct(img, 8)
        back = assemble_blocks(grid)
        assert np.max(np.abs(back - img.pixels)) < 1e-9

    def test_linearity(self):
        rng = np.random.default_rng(2)
        x = rng.uniform(0, 100, (8, 8))
        y = rng.uniform(0, 100, (8, 8))
        a, b = 0.6, 0.4
        cx = block_dct(GrayImage(x), 8).coeffs
        cy = block_dct(GrayImage(y), 8).coeffs
        combined = block_dct(GrayImage(a * x + b * y), 8).coeffs
        np.testing.assert_allclose(combined, a * cx + b * cy, atol=1e-9)

    def test_row_major_block_order(self):
        # each tile constant = its row-major index; DC sequence must be increasing
        tiles = np.arange(6.0).repeat(16).reshape(2, 3, 4, 4).transpose(0, 2, 1, 3)
        pixels = tiles.reshape(8, 12)
        grid = block_dct(GrayImage(pixels), 4)
        np.testing.assert_allclose(grid.dc_values(), np.arange(6.0) * 4.0, atol=1e-12)

    def test_residual_pixels_discarded(self):
        img = random_image(np.random.default_rng(3), 13, 17)
        grid = block_dct(img, 8)
        assert grid.n_blocks == (13 // 8) * (17 // 8) == 2
        assert grid.grid_shape == (1, 2)

    def test_image_smaller_than_block(self):
        with pytest.raises(InvalidInput):
            block_dct(GrayImage(np.zeros((4, 4))), 8)

    def test_deterministic(self):
        img = random_image(np.random.default_rng(4), 16, 16)
        a = block_dct(img, 8).coeffs
        b = block_dct(img, 8).coeffs
        np.testing.assert_array_equal(a, b)

    def test_dct_matrix_orthonormal(self):
        for b in (2, 4, 8):
            c = dct_matrix(b)
            np.testing.assert_allclose(c @ c.T, np.eye(b), atol=1e-12)

    def test_ac_accessors(self):
        grid = block_dct(random_image(np.random.default_rng(5), 16, 16), 8)
        assert grid.ac_values().shape == (4 * 63,)
        assert grid.ac_at(0, 1).shape == (4,)
        with pytest.raises(InvalidInput):
            grid.ac_at(0, 0)

    def test_idct_roundtrip(self):
        rng = np.random.default_rng(6)
        block = rng.normal(0, 10, (8, 8))
        c = dct_matrix(8)
        np.testing.assert_allclose(idct_block(c @ block @ c.T), block, atol=1e-9)


class TestHaar:
    def test_pair_example(self):
        approx, detail = haar_step_1d([4.0, 2.0])
        assert approx[0] == pytest.approx(3 * np.sqrt(2), abs=1e-12)
        assert detail[0] == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_constant_image_has_zero_details(self):
        img = GrayImage(np.full((16, 16), 42.0))
        for sb in dwt_haar(img, 3):
            np.testing.assert_allclose(sb.values, 0.0, atol=1e-12)

    def test_energy_conservation(self):
        rng = np.random.default_rng(7)
        img = random_image(rng, 16, 16)
        approx, subbands = haar_decompose(img, 3)
        total = np.sum(approx**2) + sum(np.sum(sb.values**2) for sb in subbands)
        reference = np.sum(img.pixels**2)
        assert abs(total - reference) <= 1e-9 * reference

    def test_perfect_reconstruction(self):
        rng = np.random.default_rng(8)
        img = random_image(rng, 32, 32)
        approx, subbands = haar_decompose(img, 3)
        back = haar_reconstruct(approx, subbands)
        assert np.max(np.abs(back - img.pixels)) < 1e-9

    def test_subband_shapes_halve_per_level(self):
        img = random_image(np.random.default_rng(9), 16, 16)
        subbands = dwt_haar(img, 3)
        assert len(subbands) == 9
        for sb in subbands:
            expected = 16 // 2**sb.level
            assert sb.values.shape == (expected, expected)
            assert sb.count == expected * expected
        assert [sb.orientation for sb in subbands[:3]] == list(ORIENTATIONS)

    def test_padding_to_dyadic_size(self):
        img = random_image(np.random.default_rng(10), 6, 6)
        subbands = dwt_haar(img, 2)
        assert subbands[0].values.shape == (4, 4)  # padded to 8x8
        assert subbands[-1].values.shape == (2, 2)

    def test_padding_uses_edge_replication(self):
        # constant image stays constant after padding: details still vanish
        img = GrayImage(np.full((5, 7), 3.0))
        for sb in dwt_haar(img, 2):
            np.testing.assert_allclose(sb.values, 0.0, atol=1e-12)

    def test_orientation_meaning(self):
        # horizontal stripes -> detail only in the "horizontal" subband
        pixels = np.zeros((8, 8))
        pixels[1::2, :] = 100.0
        subbands = dwt_haar(GrayImage(pixels), 1)
        by_orientation = {sb.orientation: sb.values for sb in subbands}
        assert np.all(np.abs(by_orientation["horizontal"]) > 0)
        np.testing.assert_allclose(by_orientation["vertical"], 0.0, atol=1e-12)
        np.testing.assert_allclose(by_orientation["diagonal"], 0.0, atol=1e-12)

    def test_rejects_bad_levels(self):
        img = random_image(np.random.default_rng(11), 8, 8)
        with pytest.raises(InvalidInput):
            dwt_haar(img, 0)
        with pytest.raises(InvalidInput):
            dwt_haar(img, 64)

    def test_deterministic(self):
        img = random_image(np.random.default_rng(12), 16, 16)
        first = [sb.values for sb in dwt_haar(img, 3)]
        second = [sb.values for sb in dwt_haar(img, 3)]
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a, b)

    def test_haar_step_rejects_odd_length(self):
        with pytest.raises(InvalidInput):
            haar_step_1d([1.0, 2.0, 3.0])
