"""Region-wise fast convolution: transform, batched GEMM, inverse transform.

The output plane is cut into a grid of m_h x m_w tiles.  Producing one
tile needs a t_h x t_w input window (t = m + k - 1), so windows of
neighbouring tiles overlap by k - 1 rows/columns.  Stage by stage:

  1. transform_input samples every window into the transform domain.
     Windows are read with zero fill, so padding and edge overhang need
     no special casing; overhung values only feed output pixels that
     the final crop discards.
  2. batched_gemm multiplies, for each of the t_h*t_w tile-local
     coordinates, the [regions x channels] input matrix by the
     [channels x features] kernel matrix.  All channel reduction
     happens inside these GEMMs.
  3. transform_output maps each region back to an m_h x m_w output
     block and writes it at the region's place in the output plane,
     cropping blocks that stick out past the right/bottom edge.

Region index rho runs row-major over (batch image, tile row, tile col);
tile-local coordinate index is u * t_w + v.  Weights are HWIO and can
be transformed once and reused across calls.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import ConstructionError, LayoutError, SizeError, UnsupportedVariantError
from .gemm import DEFAULT_CONFIG, GemmConfig, MacCounter, gemm
from .tensor import ConvLayerSpec, Layout, Tensor4D, conv_output_shape, tensor_new
from .transforms import TransformSet, generate_1d

ROLE_INPUT = "input"
ROLE_WEIGHT = "weight"
ROLE_OUTPUT = "output"


@dataclass(frozen=True)
class TileMatrixBatch:
    """One matrix per tile-local coordinate, stacked into a single
    (count, rows, cols) float32 array.  `role` records which pipeline
    stage produced it so mismatched operands fail loudly.
    """

    role: str
    data: np.ndarray

    def __post_init__(self):
        if self.role not in (ROLE_INPUT, ROLE_WEIGHT, ROLE_OUTPUT):
            raise SizeError(f"unknown batch role {self.role!r}")
        if self.data.ndim != 3 or self.data.dtype != np.float32:
            raise SizeError("batch data must be a (count, rows, cols) float32 array")

    @property
    def count(self) -> int:
        return self.data.shape[0]

    @property
    def rows(self) -> int:
        return self.data.shape[1]

    @property
    def cols(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class WinogradPlan:
    """Everything shape-dependent, fixed once per (layer, tile size).

    `regions` counts tiles for a single image; multiply by the batch
    size for larger batches (region_count does).
    """

    spec: ConvLayerSpec
    m_h: int
    m_w: int
    t_h: int
    t_w: int
    ts_h: TransformSet
    ts_w: TransformSet
    out_h: int
    out_w: int
    tiles_h: int
    tiles_w: int
    regions: int
    tile_area: int

    def region_count(self, batch: int = 1) -> int:
        return batch * self.tiles_h * self.tiles_w

    def gemm_mac_count(self, batch: int = 1) -> int:
        """Closed-form multiply count of stage 2."""
        return (
            self.tile_area
            * self.region_count(batch)
            * self.spec.in_c
            * self.spec.out_m
        )


def build_plan(
    spec: ConvLayerSpec,
    m_h: int,
    m_w: int,
    *,
    allow_large_tiles: bool = False,
) -> WinogradPlan:
    """Pick transforms and tile grid for one layer.

    Only stride 1 is supported here.  A kernel axis of length 1 needs
    no transform along that axis, so it forces tile size 1 there (the
    generated 1x1 transform set is the identity).
    """
    if spec.stride != 1:
        raise UnsupportedVariantError(
            f"layer {spec.name!r} has stride {spec.stride}; this engine only "
            "handles stride 1"
        )
    if m_h < 1 or m_w < 1:
        raise ConstructionError(f"tile size must be >= 1, got {m_h}x{m_w}")
    if spec.k_h == 1 and m_h != 1:
        raise ConstructionError("kernel axis of length 1 requires tile size 1 there")
    if spec.k_w == 1 and m_w != 1:
        raise ConstructionError("kernel axis of length 1 requires tile size 1 there")
    ts_h = generate_1d(m_h, spec.k_h, allow_large_tiles=allow_large_tiles)
    ts_w = generate_1d(m_w, spec.k_w, allow_large_tiles=allow_large_tiles)
    out_h, out_w = conv_output_shape(spec)
    tiles_h = -(-out_h // m_h)
    tiles_w = -(-out_w // m_w)
    return WinogradPlan(
        spec=spec,
        m_h=m_h,
        m_w=m_w,
        t_h=ts_h.t,
        t_w=ts_w.t,
        ts_h=ts_h,
        ts_w=ts_w,
        out_h=out_h,
        out_w=out_w,
        tiles_h=tiles_h,
        tiles_w=tiles_w,
        regions=tiles_h * tiles_w,
        tile_area=ts_h.t * ts_w.t,
    )


def _sandwich(left: np.ndarray, stack: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Apply `left` along axis 1 and `right` along axis 2 of a stack of
    (count, rows, cols, channels) blocks: out[r] = left @ stack[r] @ right.T
    per channel, returned as (rows', cols', count, channels).
    """
    # (a, count, cols, c) <- contract rows
    tmp = np.tensordot(left, stack, axes=([1], [1]))
    # (b, a, count, c) <- contract cols
    out = np.tensordot(right, tmp, axes=([1], [2]))
    return out.transpose(1, 0, 2, 3)


def transform_weights(plan: WinogradPlan, weights: np.ndarray) -> TileMatrixBatch:
    """HWIO kernel -> per-coordinate [channels x features] matrices."""
    spec = plan.spec
    weights = np.asarray(weights, dtype=np.float32)
    want = (spec.k_h, spec.k_w, spec.in_c, spec.out_m)
    if weights.shape != want:
        raise SizeError(f"weights shape {weights.shape}, plan needs {want}")
    # treat the feature axis as the block axis: (m, k_h, k_w, c)
    stack = weights.transpose(3, 0, 1, 2)
    u = _sandwich(plan.ts_h.g, stack, plan.ts_w.g)  # (t_h, t_w, m, c)
    data = np.ascontiguousarray(
        u.transpose(0, 1, 3, 2).reshape(plan.tile_area, spec.in_c, spec.out_m),
        dtype=np.float32,
    )
    return TileMatrixBatch(role=ROLE_WEIGHT, data=data)


def gather_windows(plan: WinogradPlan, x: Tensor4D) -> np.ndarray:
    """All input windows as one (regions, t_h, t_w, c) array.

    Equivalent to calling extract_region at (ti*m_h - pad_top,
    tj*m_w - pad_left) for every region, but gathered through a single
    padded strided view.  The pad covers both the declared padding and
    the overhang of edge tiles; overhung zeros only influence output
    pixels the final crop drops.
    """
    spec = plan.spec
    if x.layout != Layout.NHWC:
        raise LayoutError("engine input must be NHWC")
    n, h, w, c = x.dims
    if (h, w, c) != (spec.in_h, spec.in_w, spec.in_c):
        raise SizeError(
            f"input dims {x.dims} do not match layer {spec.name!r} "
            f"({spec.in_h}, {spec.in_w}, {spec.in_c})"
        )
    pt, pb, pl, pr = spec.pad
    need_h = (plan.tiles_h - 1) * plan.m_h + plan.t_h
    need_w = (plan.tiles_w - 1) * plan.m_w + plan.t_w
    pad_b = pb + max(0, need_h - (h + pt + pb))
    pad_r = pr + max(0, need_w - (w + pl + pr))
    padded = np.pad(x.view(), ((0, 0), (pt, pad_b), (pl, pad_r), (0, 0)))
    view = np.lib.stride_tricks.sliding_window_view(
        padded, (plan.t_h, plan.t_w), axis=(1, 2)
    )  # (n, starts_h, starts_w, c, t_h, t_w)
    grid = view[:, :: plan.m_h, :: plan.m_w][:, : plan.tiles_h, : plan.tiles_w]
    windows = grid.transpose(0, 1, 2, 4, 5, 3).reshape(
        plan.region_count(n), plan.t_h, plan.t_w, c
    )
    return np.ascontiguousarray(windows, dtype=np.float32)


def transform_input(plan: WinogradPlan, x: Tensor4D) -> TileMatrixBatch:
    """Gather every input window and move it to the transform domain."""
    windows = gather_windows(plan, x)
    v = _sandwich(plan.ts_h.bt, windows, plan.ts_w.bt)  # (t_h, t_w, R, c)
    data = np.ascontiguousarray(
        v.reshape(plan.tile_area, windows.shape[0], plan.spec.in_c),
        dtype=np.float32,
    )
    return TileMatrixBatch(role=ROLE_INPUT, data=data)


def batched_gemm(
    inputs: TileMatrixBatch,
    weights: TileMatrixBatch,
    *,
    config: GemmConfig = DEFAULT_CONFIG,
    counter: Optional[MacCounter] = None,
    threads: int = 1,
) -> TileMatrixBatch:
    """One [regions x C] @ [C x M] product per tile coordinate."""
    if inputs.role != ROLE_INPUT or weights.role != ROLE_WEIGHT:
        raise SizeError(
            f"operand roles must be ({ROLE_INPUT}, {ROLE_WEIGHT}), "
            f"got ({inputs.role}, {weights.role})"
        )
    if inputs.count != weights.count:
        raise SizeError(
            f"batch counts disagree: {inputs.count} input vs {weights.count} weight"
        )
    if inputs.cols != weights.rows:
        raise SizeError(
            f"channel dims disagree: input {inputs.cols} vs weight {weights.rows}"
        )
    out = np.empty((inputs.count, inputs.rows, weights.cols), dtype=np.float32)

    def run(i: int) -> None:
        out[i] = gemm(inputs.data[i], weights.data[i], config=config, counter=counter)

    if threads <= 1:
        for i in range(inputs.count):
            run(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(inputs.count)))
    return TileMatrixBatch(role=ROLE_OUTPUT, data=out)


def transform_output(plan: WinogradPlan, products: TileMatrixBatch) -> Tensor4D:
    """Inverse transform each region and scatter it into the output."""
    if products.role != ROLE_OUTPUT:
        raise SizeError(f"expected an {ROLE_OUTPUT} batch, got {products.role!r}")
    m = plan.spec.out_m
    if products.count != plan.tile_area or products.cols != m:
        raise SizeError(
            f"product batch is {products.count}x{products.rows}x{products.cols}, "
            f"plan needs {plan.tile_area}x(regions)x{m}"
        )
    per_image = plan.regions
    if products.rows % per_image != 0:
        raise SizeError(
            f"{products.rows} regions do not cover whole images of {per_image}"
        )
    n = products.rows // per_image
    tiles = products.data.reshape(plan.t_h, plan.t_w, products.rows, m)
    # (R, t_h, t_w, m) blocks -> (R, m_h, m_w, m) output tiles
    blocks = _sandwich(plan.ts_h.at, tiles.transpose(2, 0, 1, 3), plan.ts_w.at)
    blocks = blocks.transpose(2, 0, 1, 3)
    # lay the tiles out as a full plane, then crop the edge overhang
    plane = (
        blocks.reshape(n, plan.tiles_h, plan.tiles_w, plan.m_h, plan.m_w, m)
        .transpose(0, 1, 3, 2, 4, 5)
        .reshape(n, plan.tiles_h * plan.m_h, plan.tiles_w * plan.m_w, m)
    )
    out = np.ascontiguousarray(plane[:, : plan.out_h, : plan.out_w, :], dtype=np.float32)
    return tensor_new((n, plan.out_h, plan.out_w, m), Layout.NHWC, out.reshape(-1))


def convolve(
    plan: WinogradPlan,
    x: Tensor4D,
    weights: Union[np.ndarray, TileMatrixBatch],
    *,
    config: GemmConfig = DEFAULT_CONFIG,
    counter: Optional[MacCounter] = None,
    threads: int = 1,
) -> Tensor4D:
    """Whole pipeline.  Pass a TileMatrixBatch to reuse transformed
    weights across calls (they only depend on the kernel).
    """
    if isinstance(weights, TileMatrixBatch):
        wbatch = weights
    else:
        wbatch = transform_weights(plan, weights)
    vbatch = transform_input(plan, x)
    products = batched_gemm(vbatch, wbatch, config=config, counter=counter, threads=threads)
    return transform_output(plan, products)
