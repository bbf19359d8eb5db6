"""Dense 4-D tensors and convolution layer geometry.

A Tensor4D always describes the same logical object: a batch of `n`
images, `h` rows by `w` columns, with `c` channels.  The `layout` says
how that object is linearized in the flat `data` buffer:

    NHWC: offset = ((n * h + i) * w + j) * c + ch
    NCHW: offset = ((n * c + ch) * h + i) * w + j

`dims` is always the logical (n, h, w, c) tuple regardless of layout.
Tensors are immutable; the backing numpy array has writeable=False.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import InputError, LayoutError, ShapeError, SizeError


class Layout(enum.IntEnum):
    NHWC = 0
    NCHW = 1


@dataclass(frozen=True)
class Tensor4D:
    """Immutable 4-D float32 tensor with an explicit memory layout."""

    dims: tuple[int, int, int, int]
    layout: Layout
    data: np.ndarray  # flat float32, read-only

    def __post_init__(self):
        if len(self.dims) != 4 or any(d < 1 for d in self.dims):
            raise ShapeError(f"dims must be four positive ints, got {self.dims}")
        if self.data.ndim != 1 or self.data.dtype != np.float32:
            raise SizeError("data must be a flat float32 array")
        want = self.dims[0] * self.dims[1] * self.dims[2] * self.dims[3]
        if self.data.size != want:
            raise SizeError(
                f"data has {self.data.size} elements, dims {self.dims} need {want}"
            )

    @property
    def size(self) -> int:
        n, h, w, c = self.dims
        return n * h * w * c

    def view(self) -> np.ndarray:
        """The buffer reshaped to its native axis order (no copy)."""
        n, h, w, c = self.dims
        if self.layout == Layout.NHWC:
            return self.data.reshape(n, h, w, c)
        return self.data.reshape(n, c, h, w)

    def nhwc(self) -> np.ndarray:
        """Logical (n, h, w, c) view; a transposed view for NCHW tensors."""
        if self.layout == Layout.NHWC:
            return self.view()
        return self.view().transpose(0, 2, 3, 1)

    def at(self, n: int, i: int, j: int, ch: int) -> float:
        """Element lookup through the documented flat index map."""
        _, h, w, c = self.dims
        if self.layout == Layout.NHWC:
            off = ((n * h + i) * w + j) * c + ch
        else:
            off = ((n * c + ch) * h + i) * w + j
        return float(self.data[off])


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def tensor_new(
    dims: tuple[int, int, int, int],
    layout: Layout = Layout.NHWC,
    fill: Union[float, np.ndarray, None] = 0.0,
) -> Tensor4D:
    """Allocate a tensor, filled with a scalar or copied from an array.

    An array fill is interpreted as the flat buffer in the requested
    layout and must match the element count exactly.
    """
    n, h, w, c = dims
    if any(d < 1 for d in dims):
        raise ShapeError(f"dims must be positive, got {dims}")
    count = n * h * w * c
    if fill is None:
        fill = 0.0
    if np.isscalar(fill):
        data = np.full(count, fill, dtype=np.float32)
    else:
        data = np.asarray(fill, dtype=np.float32).reshape(-1).copy()
        if data.size != count:
            raise SizeError(f"fill has {data.size} elements, dims {dims} need {count}")
    return Tensor4D(dims, Layout(layout), _freeze(data))


def convert_layout(t: Tensor4D, target: Layout) -> Tensor4D:
    """Reorder the buffer into `target` layout.

    Pure permutation: every element is moved bit-exactly, no arithmetic.
    """
    target = Layout(target)
    if t.layout == target:
        return Tensor4D(t.dims, target, _freeze(t.data.copy()))
    if target == Layout.NCHW:
        flat = t.view().transpose(0, 3, 1, 2).reshape(-1).copy()
    else:
        flat = t.view().transpose(0, 2, 3, 1).reshape(-1).copy()
    return Tensor4D(t.dims, target, _freeze(flat))


@dataclass(frozen=True)
class ConvLayerSpec:
    """Geometry of one convolution layer.

    pad is (top, bottom, left, right).  Correlation convention: the
    kernel slides without flipping, output pixel (p, q) reads input
    rows p*stride - pad_top + u for u in [0, k_h).
    """

    name: str
    in_h: int
    in_w: int
    in_c: int
    out_m: int
    k_h: int
    k_w: int
    pad: tuple[int, int, int, int] = (0, 0, 0, 0)
    stride: int = 1

    def __post_init__(self):
        for field in ("in_h", "in_w", "in_c", "out_m", "k_h", "k_w"):
            if getattr(self, field) < 1:
                raise ShapeError(f"{field} must be >= 1 in layer {self.name!r}")
        if len(self.pad) != 4 or any(p < 0 for p in self.pad):
            raise ShapeError(f"pad must be four ints >= 0, got {self.pad}")
        if self.stride < 1:
            raise ShapeError(f"stride must be >= 1, got {self.stride}")


def conv_output_shape(spec: ConvLayerSpec) -> tuple[int, int]:
    """(out_h, out_w) for the layer, or ShapeError if either is nonpositive."""
    pt, pb, pl, pr = spec.pad
    oh = (spec.in_h + pt + pb - spec.k_h) // spec.stride + 1
    ow = (spec.in_w + pl + pr - spec.k_w) // spec.stride + 1
    if oh < 1 or ow < 1:
        raise ShapeError(
            f"layer {spec.name!r} has empty output {oh}x{ow} for "
            f"input {spec.in_h}x{spec.in_w} kernel {spec.k_h}x{spec.k_w} pad {spec.pad}"
        )
    return oh, ow


def extract_region(
    t: Tensor4D, image: int, row0: int, col0: int, rows: int, cols: int
) -> np.ndarray:
    """Copy a (rows, cols, c) window starting at (row0, col0), which may
    be negative or run past the edge; out-of-bounds positions are zero.
    """
    if t.layout != Layout.NHWC:
        raise LayoutError("extract_region requires NHWC input")
    n, h, w, c = t.dims
    if not 0 <= image < n:
        raise SizeError(f"image index {image} out of range for batch {n}")
    out = np.zeros((rows, cols, c), dtype=np.float32)
    src_r0 = max(row0, 0)
    src_r1 = min(row0 + rows, h)
    src_c0 = max(col0, 0)
    src_c1 = min(col0 + cols, w)
    if src_r0 < src_r1 and src_c0 < src_c1:
        out[src_r0 - row0 : src_r1 - row0, src_c0 - col0 : src_c1 - col0] = t.view()[
            image, src_r0:src_r1, src_c0:src_c1, :
        ]
    return out


_HEADER = struct.Struct("<IIIIB")  # n, h, w, c, layout


def write_tensor(t: Tensor4D, path: Union[str, Path]) -> None:
    """Serialize: four u32 little-endian dims, one layout byte, f32 data."""
    payload = _HEADER.pack(*t.dims, int(t.layout)) + t.data.astype("<f4").tobytes()
    Path(path).write_bytes(payload)


def read_tensor(path: Union[str, Path]) -> Tensor4D:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise InputError(f"{path}: truncated header ({len(raw)} bytes)")
    n, h, w, c, layout_byte = _HEADER.unpack_from(raw)
    if layout_byte not in (0, 1):
        raise InputError(f"{path}: unknown layout byte {layout_byte}")
    body = raw[_HEADER.size :]
    want = n * h * w * c * 4
    if len(body) != want:
        raise InputError(f"{path}: expected {want} data bytes, found {len(body)}")
    data = np.frombuffer(body, dtype="<f4").astype(np.float32)
    return Tensor4D((n, h, w, c), Layout(layout_byte), _freeze(data))
