import numpy as np
import pytest

from winoconv.baselines import (
    direct_conv,
    im2row,
    im2row_conv,
    im2row_mac_count,
)
from winoconv.errors import LayoutError, SizeError
from winoconv.gemm import MacCounter
from winoconv.tensor import ConvLayerSpec, Layout, tensor_new


def _random_case(rng, spec, batch=1):
    x = tensor_new(
        (batch, spec.in_h, spec.in_w, spec.in_c),
        Layout.NHWC,
        rng.uniform(-1, 1, batch * spec.in_h * spec.in_w * spec.in_c).astype(np.float32),
    )
    w = rng.uniform(-1, 1, (spec.k_h, spec.k_w, spec.in_c, spec.out_m)).astype(np.float32)
    return x, w


def test_direct_zero_weights():
    spec = ConvLayerSpec("z", 5, 5, 2, 3, 3, 3, (1, 1, 1, 1))
    x, w = _random_case(np.random.default_rng(0), spec)
    out = direct_conv(x, np.zeros_like(w), spec)
    assert not out.data.any()


def test_direct_1x1_scaling():
    spec = ConvLayerSpec("s", 4, 4, 1, 1, 1, 1, (0, 0, 0, 0))
    x, _ = _random_case(np.random.default_rng(1), spec)
    w = np.full((1, 1, 1, 1), 2.0, dtype=np.float32)
    out = direct_conv(x, w, spec)
    assert np.array_equal(out.data, x.data * 2.0)


def test_direct_all_ones():
    # 4x4 ones against a 3x3 ones kernel: every valid output is 9
    spec = ConvLayerSpec("o", 4, 4, 1, 1, 3, 3, (0, 0, 0, 0))
    x = tensor_new((1, 4, 4, 1), Layout.NHWC, 1.0)
    w = np.ones((3, 3, 1, 1), dtype=np.float32)
    out = direct_conv(x, w, spec)
    assert out.dims == (1, 2, 2, 1)
    assert out.data.tolist() == [9.0] * 4


def test_direct_shape_checks():
    spec = ConvLayerSpec("c", 4, 4, 2, 1, 3, 3, (0, 0, 0, 0))
    x = tensor_new((1, 4, 4, 2), Layout.NHWC, 0.0)
    with pytest.raises(SizeError):
        direct_conv(x, np.zeros((3, 3, 1, 1), np.float32), spec)
    nchw = tensor_new((1, 4, 4, 2), Layout.NCHW, 0.0)
    with pytest.raises(LayoutError):
        direct_conv(nchw, np.zeros((3, 3, 2, 1), np.float32), spec)


def test_im2row_1x1_is_reshape():
    spec = ConvLayerSpec("r", 3, 4, 5, 2, 1, 1, (0, 0, 0, 0))
    x, _ = _random_case(np.random.default_rng(2), spec)
    low = im2row(x, spec)
    assert low.rows == 12 and low.cols == 5
    assert np.array_equal(low.data, x.view().reshape(12, 5))


def test_im2row_first_row_is_first_patch():
    spec = ConvLayerSpec("p", 4, 4, 1, 1, 3, 3, (0, 0, 0, 0))
    x = tensor_new((1, 4, 4, 1), Layout.NHWC, np.arange(16, dtype=np.float32))
    low = im2row(x, spec)
    assert low.rows == 4 and low.cols == 9
    # top-left 3x3 patch, kernel offsets row-major
    assert low.data[0].tolist() == [0, 1, 2, 4, 5, 6, 8, 9, 10]


def test_im2row_padding_zeros():
    spec = ConvLayerSpec("z", 3, 3, 1, 1, 3, 3, (1, 1, 1, 1))
    x = tensor_new((1, 3, 3, 1), Layout.NHWC, np.arange(1, 10, dtype=np.float32))
    low = im2row(x, spec)
    # output pixel (0,0): every kernel offset touching the border is 0
    assert low.data[0].tolist() == [0, 0, 0, 0, 1, 2, 0, 4, 5]


def test_im2row_column_index_map():
    # column for offset (u,v) channel c is (u*k_w + v)*C + c
    spec = ConvLayerSpec("m", 5, 5, 3, 1, 3, 3, (0, 0, 0, 0))
    x, _ = _random_case(np.random.default_rng(3), spec)
    low = im2row(x, spec)
    view = x.view()[0]
    u, v, c, row = 2, 1, 2, 4  # row 4 is output pixel (1, 1) of the 3x3 grid
    assert low.data[row, (u * 3 + v) * 3 + c] == view[1 + u, 1 + v, c]


def test_im2row_counts():
    spec = ConvLayerSpec("n", 9, 7, 4, 6, 3, 3, (1, 0, 2, 1), stride=2)
    x, _ = _random_case(np.random.default_rng(4), spec, batch=2)
    low = im2row(x, spec)
    assert low.rows * low.cols == (2 * 4 * 4) * (3 * 3 * 4)
    assert low.spec is spec


def test_im2row_conv_matches_direct_random():
    spec = ConvLayerSpec("d", 8, 8, 4, 8, 3, 3, (1, 1, 1, 1))
    x, w = _random_case(np.random.default_rng(5), spec)
    got = im2row_conv(x, w, spec)
    want = direct_conv(x, w, spec)
    tol = 1e-5 * max(1.0, float(np.abs(want.data).max()))
    assert float(np.abs(got.data - want.data).max()) <= tol


def test_im2row_conv_delta_identity():
    spec = ConvLayerSpec("i", 6, 6, 1, 1, 3, 3, (1, 1, 1, 1))
    x, _ = _random_case(np.random.default_rng(6), spec)
    w = np.zeros((3, 3, 1, 1), dtype=np.float32)
    w[1, 1, 0, 0] = 1.0
    out = im2row_conv(x, w, spec)
    assert np.array_equal(out.data, x.data)


def test_im2row_conv_mac_count():
    spec = ConvLayerSpec("f", 6, 6, 3, 4, 3, 3, (0, 0, 0, 0))
    x, w = _random_case(np.random.default_rng(7), spec)
    counter = MacCounter()
    im2row_conv(x, w, spec, counter=counter)
    assert counter.mac_count() == 1728
    assert im2row_mac_count(spec) == 1728


def test_baselines_agree_across_shapes():
    # mutual agreement of two independent lowerings, strides included
    rng = np.random.default_rng(8)
    cases = []
    for k in (1, 3, 5, 7):
        for stride in (1, 2):
            for pad in (0, 1, 2, 3):
                cases.append((k, stride, pad))
    for k, stride, pad in cases:
        in_h = int(rng.integers(max(1, k - 2 * pad), 15))
        in_w = int(rng.integers(max(1, k - 2 * pad), 15))
        c = int(rng.integers(1, 6))
        m = int(rng.integers(1, 6))
        spec = ConvLayerSpec(
            f"k{k}s{stride}p{pad}", in_h, in_w, c, m, k, k, (pad,) * 4, stride
        )
        x, w = _random_case(rng, spec, batch=int(rng.integers(1, 3)))
        got = im2row_conv(x, w, spec)
        want = direct_conv(x, w, spec)
        tol = 1e-5 * max(1.0, float(np.abs(want.data).max()))
        assert float(np.abs(got.data - want.data).max()) <= tol, spec.name
