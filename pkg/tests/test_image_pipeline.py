import numpy as np
import pytest

from splicestat.errors import InvalidInput
from splicestat.image_pipeline import (
    GrayImage,
    PreprocessConfig,
    gaussian_filter,
    gaussian_kernel,
    median_filter,
    preprocess,
    resize_bilinear,
    to_luminance,
)

from helpers import random_image


class TestGrayImage:
    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidInput):
            GrayImage(np.array([[0.0, 256.0]]))
        with pytest.raises(InvalidInput):
            GrayImage(np.array([[-1.0, 0.0]]))

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInput):
            GrayImage(np.array([[np.nan, 1.0]]))

    def test_rejects_empty(self):
        with pytest.raises(InvalidInput):
            GrayImage(np.empty((0, 4)))

    def test_pixels_are_read_only(self):
        img = GrayImage(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            img.pixels[0, 0] = 1.0

    def test_width_height(self):
        img = GrayImage(np.zeros((3, 5)))
        assert (img.width, img.height) == (5, 3)


class TestToLuminance:
    def test_white_is_255(self):
        rgb = np.full((1, 1, 3), 255.0)
        assert to_luminance(rgb).pixels[0, 0] == pytest.approx(255.0)

    def test_black_is_0(self):
        rgb = np.zeros((1, 1, 3))
        assert to_luminance(rgb).pixels[0, 0] == 0.0

    def test_pure_red(self):
        # 0.299 * 255 evaluated by hand
        rgb = np.zeros((1, 1, 3))
        rgb[0, 0, 0] = 255.0
        assert to_luminance(rgb).pixels[0, 0] == pytest.approx(76.245, abs=1e-12)

    def test_monotone_in_each_channel(self):
        rng = np.random.default_rng(11)
        base = rng.uniform(0, 254, (4, 4, 3))
        y0 = to_luminance(base).pixels
        for channel in range(3):
            bumped = base.copy()
            bumped[:, :, channel] += 1.0
            assert np.all(to_luminance(bumped).pixels > y0)

    def test_bounded(self):
        rng = np.random.default_rng(12)
        rgb = rng.uniform(0, 255, (8, 8, 3))
        y = to_luminance(rgb).pixels
        assert y.min() >= 0.0 and y.max() <= 255.0

    def test_zero_sized_raster(self):
        with pytest.raises(InvalidInput):
            to_luminance(np.empty((0, 3, 3)))


class TestResizeBilinear:
    def test_two_by_two_to_three_by_three(self):
        # hand evaluation of the align-corners formula
        img = GrayImage(np.array([[0.0, 2.0], [2.0, 4.0]]))
        out = resize_bilinear(img, 3, 3)
        expected = np.array([[0.0, 1.0, 2.0], [1.0, 2.0, 3.0], [2.0, 3.0, 4.0]])
        np.testing.assert_allclose(out.pixels, expected, atol=1e-12)

    def test_identity_at_same_size(self):
        img = random_image(np.random.default_rng(0), 7, 5)
        out = resize_bilinear(img, 5, 7)
        np.testing.assert_array_equal(out.pixels, img.pixels)

    def test_constant_stays_constant(self):
        img = GrayImage(np.full((4, 6), 37.5))
        out = resize_bilinear(img, 9, 3)
        np.testing.assert_allclose(out.pixels, 37.5, atol=1e-12)

    def test_output_within_input_range(self):
        rng = np.random.default_rng(1)
        img = random_image(rng, 6, 6)
        out = resize_bilinear(img, 11, 4)
        assert out.pixels.min() >= img.pixels.min() - 1e-12
        assert out.pixels.max() <= img.pixels.max() + 1e-12

    def test_output_dimensions(self):
        img = random_image(np.random.default_rng(2), 5, 5)
        out = resize_bilinear(img, 12, 7)
        assert (out.width, out.height) == (12, 7)

    def test_rejects_tiny_output(self):
        img = random_image(np.random.default_rng(3), 4, 4)
        with pytest.raises(InvalidInput):
            resize_bilinear(img, 1, 4)


class TestMedianFilter:
    def test_removes_isolated_spike(self):
        pixels = np.zeros((5, 5))
        pixels[2, 2] = 255.0
        out = median_filter(GrayImage(pixels), 1)
        np.testing.assert_array_equal(out.pixels, 0.0)

    def test_constant_is_fixed_point(self):
        img = GrayImage(np.full((5, 5), 9.0))
        out = median_filter(img, 1)
        np.testing.assert_array_equal(out.pixels, img.pixels)

    def test_center_of_1_to_9(self):
        img = GrayImage(np.arange(1.0, 10.0).reshape(3, 3))
        out = median_filter(img, 1)
        assert out.pixels[1, 1] == 5.0

    def test_too_small_image(self):
        with pytest.raises(InvalidInput):
            median_filter(GrayImage(np.zeros((3, 3))), 2)

    def test_bad_radius(self):
        with pytest.raises(InvalidInput):
            median_filter(GrayImage(np.zeros((5, 5))), 0)


class TestGaussianFilter:
    def test_constant_is_fixed_point(self):
        img = GrayImage(np.full((6, 6), 123.0))
        out = gaussian_filter(img, 1.3)
        np.testing.assert_allclose(out.pixels, 123.0, atol=1e-9)

    def test_impulse_row_matches_kernel(self):
        sigma = 0.8
        kernel = gaussian_kernel(sigma)
        half = len(kernel) // 2
        size = 4 * half + 5
        pixels = np.zeros((size, size))
        center = size // 2
        pixels[center, center] = 255.0
        out = gaussian_filter(GrayImage(pixels), sigma)
        row = out.pixels[center, center - half : center + half + 1]
        # separable response: row through the impulse is k * k[half] * 255
        np.testing.assert_allclose(row, 255.0 * kernel * kernel[half], atol=1e-12)

    def test_interior_impulse_preserves_sum(self):
        sigma = 1.1
        half = int(np.ceil(3 * sigma))
        size = 2 * half + 7
        pixels = np.zeros((size, size))
        pixels[size // 2, size // 2] = 200.0
        out = gaussian_filter(GrayImage(pixels), sigma)
        assert abs(out.pixels.sum() - 200.0) < 1e-9

    def test_small_sigma_is_near_identity(self):
        rng = np.random.default_rng(4)
        img = random_image(rng, 8, 8, low=10, high=240)
        out = gaussian_filter(img, 1e-3)
        np.testing.assert_allclose(out.pixels, img.pixels, atol=1e-9)

    def test_rejects_bad_sigma(self):
        img = GrayImage(np.zeros((4, 4)))
        with pytest.raises(InvalidInput):
            gaussian_filter(img, 0.0)
        with pytest.raises(InvalidInput):
            gaussian_filter(img, -1.0)


class TestPreprocess:
    def test_none_config_is_identity(self):
        img = random_image(np.random.default_rng(5), 6, 6)
        assert preprocess(img, None) is img

    def test_applies_resize_then_filters(self):
        rng = np.random.default_rng(6)
        img = random_image(rng, 10, 10)
        cfg = PreprocessConfig(resize_to=(8, 8), median_radius=1, gaussian_sigma=0.7)
        step = resize_bilinear(img, 8, 8)
        step = median_filter(step, 1)
        step = gaussian_filter(step, 0.7)
        np.testing.assert_array_equal(preprocess(img, cfg).pixels, step.pixels)

    def test_config_validation(self):
        with pytest.raises(InvalidInput):
            PreprocessConfig(resize_to=(1, 8))
        with pytest.raises(InvalidInput):
            PreprocessConfig(median_radius=0)
        with pytest.raises(InvalidInput):
            PreprocessConfig(gaussian_sigma=0.0)
