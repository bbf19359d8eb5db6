"""Reference convolutions: a slow trusted oracle and the im2row baseline.

Both use the correlation convention (no kernel flip) and HWIO weights,
i.e. weights[u, v, c, m] multiplies input channel c at kernel offset
(u, v) into output feature m.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import LayoutError, SizeError
from .gemm import DEFAULT_CONFIG, GemmConfig, MacCounter, gemm
from .tensor import ConvLayerSpec, Layout, Tensor4D, conv_output_shape, tensor_new


def _check_operands(x: Tensor4D, weights: np.ndarray, spec: ConvLayerSpec) -> None:
    if x.layout != Layout.NHWC:
        raise LayoutError("convolution inputs must be NHWC")
    n, h, w, c = x.dims
    if (h, w, c) != (spec.in_h, spec.in_w, spec.in_c):
        raise SizeError(
            f"input dims {x.dims} do not match layer {spec.name!r} "
            f"({spec.in_h}, {spec.in_w}, {spec.in_c})"
        )
    want = (spec.k_h, spec.k_w, spec.in_c, spec.out_m)
    if weights.shape != want:
        raise SizeError(f"weights shape {weights.shape}, layer needs {want}")


def direct_conv(x: Tensor4D, weights: np.ndarray, spec: ConvLayerSpec) -> Tensor4D:
    """Plain strided correlation, float64 accumulation, any stride.

    Deliberately does nothing clever; this is the oracle everything else
    is judged against.
    """
    _check_operands(x, weights, spec)
    oh, ow = conv_output_shape(spec)
    n = x.dims[0]
    c, m = spec.in_c, spec.out_m
    st = spec.stride
    pt, pb, pl, pr = spec.pad
    xp = np.pad(
        x.nhwc().astype(np.float64), ((0, 0), (pt, pb), (pl, pr), (0, 0))
    )
    w64 = np.asarray(weights, dtype=np.float64)
    acc = np.zeros((n * oh * ow, m), dtype=np.float64)
    for u in range(spec.k_h):
        for v in range(spec.k_w):
            patch = xp[:, u : u + (oh - 1) * st + 1 : st, v : v + (ow - 1) * st + 1 : st, :]
            acc += patch.reshape(n * oh * ow, c) @ w64[u, v]
    out = acc.astype(np.float32).reshape(-1)
    return tensor_new((n, oh, ow, m), Layout.NHWC, out)


@dataclass(frozen=True)
class LoweredMatrix:
    """im2row result: one row per output pixel, one column per
    (kernel offset, channel) pair, offsets varying slower than channels.
    """

    data: np.ndarray  # (rows, cols) float32
    spec: ConvLayerSpec

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


def im2row(x: Tensor4D, spec: ConvLayerSpec) -> LoweredMatrix:
    """Lower the input so convolution becomes one GEMM.

    Row p is output pixel p in (batch, row, col) row-major order; the
    column for kernel offset (u, v) and channel c is (u*k_w + v)*C + c.
    Padding is materialized as explicit zeros.
    """
    _check_operands(x, np.empty((spec.k_h, spec.k_w, spec.in_c, spec.out_m), np.float32), spec)
    oh, ow = conv_output_shape(spec)
    n = x.dims[0]
    c = spec.in_c
    st = spec.stride
    pt, pb, pl, pr = spec.pad
    xp = np.pad(x.nhwc(), ((0, 0), (pt, pb), (pl, pr), (0, 0)))
    lowered = np.empty((n * oh * ow, spec.k_h * spec.k_w * c), dtype=np.float32)
    for u in range(spec.k_h):
        for v in range(spec.k_w):
            col0 = (u * spec.k_w + v) * c
            patch = xp[:, u : u + (oh - 1) * st + 1 : st, v : v + (ow - 1) * st + 1 : st, :]
            lowered[:, col0 : col0 + c] = patch.reshape(n * oh * ow, c)
    return LoweredMatrix(data=lowered, spec=spec)


def im2row_conv(
    x: Tensor4D,
    weights: np.ndarray,
    spec: ConvLayerSpec,
    *,
    config: GemmConfig = DEFAULT_CONFIG,
    counter: Optional[MacCounter] = None,
) -> Tensor4D:
    """Convolution as im2row followed by a single large GEMM."""
    _check_operands(x, weights, spec)
    lowered = im2row(x, spec)
    wmat = np.ascontiguousarray(
        np.asarray(weights, dtype=np.float32).reshape(-1, spec.out_m)
    )
    y = gemm(lowered.data, wmat, config=config, counter=counter)
    oh, ow = conv_output_shape(spec)
    return tensor_new((x.dims[0], oh, ow, spec.out_m), Layout.NHWC, y.reshape(-1))


def im2row_mac_count(spec: ConvLayerSpec, batch: int = 1) -> int:
    """Multiplies the lowered GEMM performs for one run of the layer."""
    oh, ow = conv_output_shape(spec)
    return batch * oh * ow * spec.k_h * spec.k_w * spec.in_c * spec.out_m
