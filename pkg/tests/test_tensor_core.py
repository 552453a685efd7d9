"""
Tests for shapes, the classical convolution oracle and the flattening conventions.
"""
import numpy as np
import pytest

from app.core.errors import ShapeError
from app.models.tensor import ConvShape, InputBatch, KernelBank, OutputBatch
from app.services.tensor_core import (
    conv_reference,
    derive_output_shape,
    flatten_input,
    flatten_output,
    unflatten_input,
)


def _triple_loop(x, k, stride, pad):
    n, h, w, c = x.shape
    r, s, _, m = k.shape
    e = (h + 2 * pad - r) // stride + 1
    f = (w + 2 * pad - s) // stride + 1
    y = np.zeros((n, e, f, m))
    for b in range(n):
        for ie in range(e):
            for jf in range(f):
                for d in range(m):
                    acc = 0.0
                    for i in range(r):
                        for j in range(s):
                            for kk in range(c):
                                row, col = ie * stride + i - pad, jf * stride + j - pad
                                if 0 <= row < h and 0 <= col < w:
                                    acc += x[b, row, col, kk] * k[i, j, kk, d]
                    y[b, ie, jf, d] = acc
    return y


@pytest.mark.unit
class TestOutputShape:
    """Output extents from input, kernel, stride and padding."""

    def test_small_configuration(self):
        assert derive_output_shape(3, 3, 2, 2) == (2, 2)

    def test_unit_kernel_preserves_extent(self):
        assert derive_output_shape(5, 5, 1, 1) == (5, 5)

    def test_stride_and_padding(self):
        assert derive_output_shape(7, 6, 3, 2, stride=2, pad=1) == (4, 4)

    def test_exhaustive_small_grid(self):
        for size in range(1, 11):
            for kernel in range(1, size + 1):
                for stride in range(1, 4):
                    for pad in range(0, 3):
                        expected = len(range(0, size + 2 * pad - kernel + 1, stride))
                        assert derive_output_shape(size, size, kernel, kernel, stride, pad) == (expected, expected)
                        assert derive_output_shape(size, 10, kernel, 1, stride, pad)[0] == expected

    def test_kernel_larger_than_padded_input(self):
        with pytest.raises(ShapeError):
            derive_output_shape(2, 2, 5, 5)

    def test_zero_stride_rejected(self):
        with pytest.raises(ShapeError):
            derive_output_shape(3, 3, 2, 2, stride=0)

    def test_channel_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            ConvShape.from_dims((1, 3, 3, 2), (2, 2, 1, 1))

    def test_shape_sizes(self, small_shape):
        assert (small_shape.E, small_shape.F) == (2, 2)
        assert small_shape.input_size == 9
        assert small_shape.output_size == 4
        assert small_shape.patch_size == 4


@pytest.mark.unit
class TestConvReference:
    """The classical oracle every other path is checked against."""

    def test_identity_kernel(self):
        x = InputBatch(np.ones((1, 3, 3, 1)))
        k = KernelBank(np.ones((1, 1, 1, 1)))
        shape = ConvShape.from_dims(x.shape, k.shape)
        np.testing.assert_array_equal(conv_reference(x, k, shape).data, np.ones((1, 3, 3, 1)))

    def test_window_sums(self, grid_input, ones_kernel, small_shape):
        y = conv_reference(grid_input, ones_kernel, small_shape)
        assert y.shape == (1, 2, 2, 1)
        np.testing.assert_array_equal(y.data[0, :, :, 0], [[12, 16], [24, 28]])

    def test_matches_triple_loop(self, rng):
        x = rng.standard_normal((1, 4, 4, 2))
        k = rng.standard_normal((3, 3, 2, 2))
        shape = ConvShape.from_dims(x.shape, k.shape)
        y = conv_reference(InputBatch(x), KernelBank(k), shape)
        np.testing.assert_allclose(y.data, _triple_loop(x, k, 1, 0), atol=1e-12)

    @pytest.mark.parametrize("stride,pad", [(1, 1), (2, 0), (2, 1), (3, 2)])
    def test_matches_triple_loop_strided_padded(self, rng, stride, pad):
        x = rng.standard_normal((2, 7, 6, 3))
        k = rng.standard_normal((3, 2, 3, 2))
        shape = ConvShape.from_dims(x.shape, k.shape, stride=stride, pad=pad)
        y = conv_reference(InputBatch(x), KernelBank(k), shape)
        np.testing.assert_allclose(y.data, _triple_loop(x, k, stride, pad), atol=1e-12)

    def test_linear_in_input_and_kernel(self, rng):
        x1, x2 = rng.standard_normal((2, 2, 5, 5, 2))
        k1, k2 = rng.standard_normal((2, 3, 3, 2, 2))
        a, b = 1.7, -0.4
        shape = ConvShape.from_dims(x1.shape, k1.shape, stride=2, pad=1)

        def conv(x, k):
            return conv_reference(InputBatch(x), KernelBank(k), shape).data

        np.testing.assert_allclose(conv(a * x1 + b * x2, k1), a * conv(x1, k1) + b * conv(x2, k1), atol=1e-12)
        np.testing.assert_allclose(conv(x1, a * k1 + b * k2), a * conv(x1, k1) + b * conv(x1, k2), atol=1e-12)

    def test_zero_kernel_gives_zero_output(self, rng):
        x = rng.standard_normal((2, 4, 4, 3))
        k = np.zeros((2, 2, 3, 2))
        shape = ConvShape.from_dims(x.shape, k.shape, pad=1)
        np.testing.assert_array_equal(conv_reference(InputBatch(x), KernelBank(k), shape).data, 0.0)

    def test_shape_mismatch(self, grid_input, small_shape):
        with pytest.raises(ShapeError):
            conv_reference(grid_input, KernelBank(np.ones((3, 3, 1, 1))), small_shape)

    def test_non_finite_input_rejected(self):
        data = np.ones((1, 2, 2, 1))
        data[0, 0, 0, 0] = np.nan
        with pytest.raises(ShapeError):
            InputBatch(data)


@pytest.mark.unit
class TestFlattening:
    """Row-major input columns and dM-major output rows."""

    def test_single_image_column(self):
        x = InputBatch(np.array([1.0, 2.0, 3.0, 4.0]).reshape(1, 2, 2, 1))
        np.testing.assert_array_equal(flatten_input(x), [[1.0], [2.0], [3.0], [4.0]])

    def test_batch_gives_one_column_per_image(self, rng):
        data = rng.standard_normal((2, 3, 3, 2))
        cols = flatten_input(InputBatch(data))
        assert cols.shape == (18, 2)
        np.testing.assert_array_equal(cols[:, 1], data[1].ravel())

    def test_unflatten_inverts_flatten(self, rng):
        data = rng.standard_normal((3, 4, 2, 2))
        shape = ConvShape(N=3, H=4, W=2, C=2, R=1, S=1, M=1)
        np.testing.assert_array_equal(unflatten_input(flatten_input(InputBatch(data)), shape).data, data)

    def test_output_maps_are_contiguous(self):
        y = np.zeros((1, 2, 2, 2))
        y[0, :, :, 0] = [[1, 2], [3, 4]]
        y[0, :, :, 1] = [[5, 6], [7, 8]]
        np.testing.assert_array_equal(flatten_output(OutputBatch(y))[:, 0], np.arange(1, 9))
