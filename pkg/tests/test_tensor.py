import struct

import numpy as np
import pytest

from winoconv.errors import InputError, LayoutError, ShapeError, SizeError
from winoconv.tensor import (
    ConvLayerSpec,
    Layout,
    conv_output_shape,
    convert_layout,
    extract_region,
    read_tensor,
    tensor_new,
    write_tensor,
)


def test_new_scalar_fill():
    t = tensor_new((1, 2, 2, 1), Layout.NHWC, 0.0)
    assert t.data.tolist() == [0.0, 0.0, 0.0, 0.0]
    assert t.dims == (1, 2, 2, 1)


def test_new_array_fill_exact_copy():
    values = [1.5, -2.25, 3.0, 0.125]
    t = tensor_new((1, 2, 2, 1), Layout.NHWC, values)
    assert t.data.tolist() == values


def test_new_fill_length_mismatch():
    with pytest.raises(SizeError):
        tensor_new((1, 2, 2, 1), Layout.NHWC, [1.0, 2.0, 3.0])


def test_new_rejects_nonpositive_dims():
    with pytest.raises(ShapeError):
        tensor_new((1, 0, 2, 1), Layout.NHWC, 0.0)


def test_data_is_immutable():
    t = tensor_new((1, 2, 2, 1), Layout.NHWC, 1.0)
    with pytest.raises(ValueError):
        t.data[0] = 5.0


def test_nhwc_flat_index_map():
    n, h, w, c = 2, 3, 4, 5
    t = tensor_new((n, h, w, c), Layout.NHWC, np.arange(n * h * w * c, dtype=np.float32))
    # value (b,i,j,ch) sits at ((b*h + i)*w + j)*c + ch
    assert t.at(1, 2, 3, 4) == ((1 * h + 2) * w + 3) * c + 4
    assert t.at(0, 1, 0, 2) == ((0 * h + 1) * w + 0) * c + 2


def test_nchw_flat_index_map():
    n, h, w, c = 2, 3, 4, 5
    t = tensor_new((n, h, w, c), Layout.NCHW, np.arange(n * h * w * c, dtype=np.float32))
    # value (b,i,j,ch) sits at ((b*c + ch)*h + i)*w + j
    assert t.at(1, 2, 3, 4) == ((1 * c + 4) * h + 2) * w + 3


def test_convert_layout_single_pixel():
    t = tensor_new((1, 1, 1, 4), Layout.NHWC, [1.0, 2.0, 3.0, 4.0])
    assert convert_layout(t, Layout.NCHW).data.tolist() == [1.0, 2.0, 3.0, 4.0]


def test_convert_layout_two_pixels():
    # pixels a,b with channels 0,1: NHWC [a0,a1,b0,b1] -> NCHW [a0,b0,a1,b1]
    t = tensor_new((1, 1, 2, 2), Layout.NHWC, [10.0, 11.0, 20.0, 21.0])
    assert convert_layout(t, Layout.NCHW).data.tolist() == [10.0, 20.0, 11.0, 21.0]


def test_convert_layout_same_layout_copies():
    t = tensor_new((1, 2, 2, 2), Layout.NCHW, np.arange(8, dtype=np.float32))
    dup = convert_layout(t, Layout.NCHW)
    assert dup.data.tolist() == t.data.tolist()
    assert dup.data is not t.data


def test_convert_layout_round_trip_random():
    rng = np.random.default_rng(42)
    for _ in range(25):
        dims = tuple(int(d) for d in rng.integers(1, 9, size=4))
        count = int(np.prod(dims))
        t = tensor_new(dims, Layout.NHWC, rng.standard_normal(count).astype(np.float32))
        back = convert_layout(convert_layout(t, Layout.NCHW), Layout.NHWC)
        assert back.data.tobytes() == t.data.tobytes()


def test_convert_layout_preserves_logical_values():
    rng = np.random.default_rng(3)
    t = tensor_new((2, 3, 4, 5), Layout.NHWC, rng.standard_normal(120).astype(np.float32))
    moved = convert_layout(t, Layout.NCHW)
    for b, i, j, ch in [(0, 0, 0, 0), (1, 2, 3, 4), (0, 2, 1, 3), (1, 0, 3, 2)]:
        assert moved.at(b, i, j, ch) == t.at(b, i, j, ch)


def test_conv_output_shape_basic():
    spec = ConvLayerSpec("a", 6, 6, 3, 4, 3, 3, (0, 0, 0, 0))
    assert conv_output_shape(spec) == (4, 4)


def test_conv_output_shape_same_padding():
    spec = ConvLayerSpec("b", 4, 4, 1, 1, 3, 3, (1, 1, 1, 1))
    assert conv_output_shape(spec) == (4, 4)


def test_conv_output_shape_stride():
    spec = ConvLayerSpec("c", 224, 224, 3, 64, 7, 7, (3, 3, 3, 3), stride=2)
    assert conv_output_shape(spec) == (112, 112)
    spec = ConvLayerSpec("d", 224, 224, 3, 96, 7, 7, (0, 0, 0, 0), stride=2)
    assert conv_output_shape(spec) == (109, 109)


def test_conv_output_shape_valid_property():
    for in_h, k in [(5, 3), (9, 5), (12, 7), (3, 1)]:
        spec = ConvLayerSpec("p", in_h, in_h, 1, 1, k, k, (0, 0, 0, 0))
        assert conv_output_shape(spec) == (in_h - k + 1, in_h - k + 1)


def test_conv_output_shape_empty_output():
    spec = ConvLayerSpec("e", 2, 2, 1, 1, 3, 3, (0, 0, 0, 0))
    with pytest.raises(ShapeError):
        conv_output_shape(spec)


def test_spec_field_validation():
    with pytest.raises(ShapeError):
        ConvLayerSpec("bad", 4, 4, 0, 1, 3, 3)
    with pytest.raises(ShapeError):
        ConvLayerSpec("bad", 4, 4, 1, 1, 3, 3, (1, 1, 1, -1))
    with pytest.raises(ShapeError):
        ConvLayerSpec("bad", 4, 4, 1, 1, 3, 3, (0, 0, 0, 0), stride=0)


def _iota_tensor(n, h, w, c):
    return tensor_new((n, h, w, c), Layout.NHWC, np.arange(n * h * w * c, dtype=np.float32))


def test_extract_region_interior():
    t = _iota_tensor(1, 6, 6, 2)
    block = extract_region(t, 0, 1, 2, 4, 4)
    assert block.shape == (4, 4, 2)
    assert np.array_equal(block, t.view()[0, 1:5, 2:6, :])


def test_extract_region_negative_origin():
    t = _iota_tensor(1, 4, 4, 1)
    block = extract_region(t, 0, -1, -1, 4, 4)
    assert np.all(block[0, :, 0] == 0)
    assert np.all(block[:, 0, 0] == 0)
    assert np.array_equal(block[1:, 1:, :], t.view()[0, :3, :3, :])


def test_extract_region_fully_outside():
    t = _iota_tensor(1, 4, 4, 1)
    assert np.all(extract_region(t, 0, 10, 10, 3, 3) == 0)
    assert np.all(extract_region(t, 0, -5, 0, 3, 3) == 0)


def test_extract_region_overlap_agreement():
    # neighbouring tiles share k-1 columns and must agree there
    t = _iota_tensor(1, 8, 8, 3)
    left = extract_region(t, 0, 0, 0, 4, 4)
    right = extract_region(t, 0, 0, 2, 4, 4)
    assert np.array_equal(left[:, 2:, :], right[:, :2, :])


def test_extract_region_batch_select():
    t = _iota_tensor(3, 4, 4, 1)
    assert np.array_equal(extract_region(t, 2, 0, 0, 4, 4), t.view()[2])
    with pytest.raises(SizeError):
        extract_region(t, 3, 0, 0, 2, 2)


def test_extract_region_requires_nhwc():
    t = tensor_new((1, 4, 4, 1), Layout.NCHW, 0.0)
    with pytest.raises(LayoutError):
        extract_region(t, 0, 0, 0, 2, 2)


def test_file_round_trip(tmp_path):
    rng = np.random.default_rng(9)
    t = tensor_new((2, 3, 5, 4), Layout.NCHW, rng.standard_normal(120).astype(np.float32))
    path = tmp_path / "t.bin"
    write_tensor(t, path)
    back = read_tensor(path)
    assert back.dims == t.dims
    assert back.layout == t.layout
    assert back.data.tobytes() == t.data.tobytes()


def test_file_golden_bytes(tmp_path):
    # four u32 LE dims, one layout byte, then f32 LE data
    t = tensor_new((1, 2, 2, 1), Layout.NHWC, [1.0, 2.0, 3.0, 4.0])
    path = tmp_path / "t.bin"
    write_tensor(t, path)
    raw = path.read_bytes()
    assert raw[:17] == struct.pack("<IIIIB", 1, 2, 2, 1, 0)
    assert raw[17:] == np.array([1, 2, 3, 4], dtype="<f4").tobytes()


def test_file_errors(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"\x01\x00")
    with pytest.raises(InputError):
        read_tensor(path)
    path.write_bytes(struct.pack("<IIIIB", 1, 1, 1, 2, 0) + b"\x00" * 4)
    with pytest.raises(InputError):
        read_tensor(path)
    path.write_bytes(struct.pack("<IIIIB", 1, 1, 1, 1, 7) + b"\x00" * 4)
    with pytest.raises(InputError):
        read_tensor(path)
