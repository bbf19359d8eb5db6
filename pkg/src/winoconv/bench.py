"""Per-layer benchmark driver and report emission.

Every layer is always measured with the im2row baseline; requested fast
variants that fit the layer (stride 1, matching kernel size) are
measured next to it.  Stage times are medians over --reps runs after
one untimed warmup.  Weight preparation (reshape for im2row, transform
for the fast path) happens once per model load in practice, so it is
excluded from the timed stages.

Inputs and kernels are drawn uniformly from [-1, 1) with a per-layer
generator seeded by (seed, layer index), so a given seed reproduces the
exact tensors regardless of which layers or variants run.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import networks
from .baselines import direct_conv, im2row
from .engine import (
    batched_gemm,
    build_plan,
    transform_input,
    transform_output,
    transform_weights,
)
from .errors import InputError, WinoconvError
from .gemm import DEFAULT_CONFIG, GemmConfig, MacCounter, gemm
from .tensor import ConvLayerSpec, Layout, Tensor4D, conv_output_shape, tensor_new

DEFAULT_SEED = 1
BASELINE_VARIANT = "im2row"

# variant name -> (tile_h, tile_w, k_h, k_w)
VARIANTS: dict[str, tuple[int, int, int, int]] = {
    "f2x2_3x3": (2, 2, 3, 3),
    "f4x4_3x3": (4, 4, 3, 3),
    "f2x2_5x5": (2, 2, 5, 5),
    "f2_1x7": (1, 2, 1, 7),
    "f2_7x1": (2, 1, 7, 1),
}

REPORT_COLUMNS = (
    "layer",
    "variant",
    "t_in_ns",
    "t_gemm_ns",
    "t_out_ns",
    "t_total_ns",
    "macs",
    "max_rel_err",
    "speedup",
)

LAYER_CSV_COLUMNS = (
    "name",
    "in_h",
    "in_w",
    "in_c",
    "out_m",
    "k_h",
    "k_w",
    "pad_t",
    "pad_b",
    "pad_l",
    "pad_r",
    "stride",
)


@dataclass(frozen=True)
class BenchRecord:
    layer: str
    variant: str
    t_in_ns: int
    t_gemm_ns: int
    t_out_ns: int
    t_total_ns: int
    macs: int
    max_rel_err: float
    speedup: float


def variant_applies(variant: str, spec: ConvLayerSpec) -> bool:
    """A fast variant fits a layer when strides are unit and the kernel
    size matches exactly; anything else falls back to the baseline.
    """
    if variant == BASELINE_VARIANT:
        return True
    _, _, k_h, k_w = VARIANTS[variant]
    return spec.stride == 1 and (spec.k_h, spec.k_w) == (k_h, k_w)


def variant_tolerance(variant: str) -> float:
    """Accepted |got - oracle| / max(1, max|oracle|) for --check."""
    if variant == BASELINE_VARIANT:
        return 1e-5
    m_h, m_w, _, _ = VARIANTS[variant]
    return 5e-4 if max(m_h, m_w) == 4 else 1e-4


def scale_layer(spec: ConvLayerSpec, scale: int) -> ConvLayerSpec:
    """Shrink channel counts by an integer factor (floor, at least 1)."""
    if scale < 1:
        raise InputError(f"scale must be >= 1, got {scale}")
    if scale == 1:
        return spec
    return replace(
        spec, in_c=max(1, spec.in_c // scale), out_m=max(1, spec.out_m // scale)
    )


def load_layer_table(source: str) -> list[ConvLayerSpec]:
    """Layers from a builtin network name or a CSV file.

    CSV header must be exactly LAYER_CSV_COLUMNS; every later line is
    one layer.  Errors carry the 1-based line number.
    """
    builtin = networks.get_network(source)
    if builtin is not None:
        return builtin
    path = Path(source)
    if not path.is_file():
        raise InputError(
            f"{source!r} is neither a builtin network "
            f"({', '.join(networks.network_names())}) nor a layer file"
        )
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != ",".join(LAYER_CSV_COLUMNS):
        raise InputError(
            f"{source}:1: header must be {','.join(LAYER_CSV_COLUMNS)!r}"
        )
    layers = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != len(LAYER_CSV_COLUMNS):
            raise InputError(
                f"{source}:{lineno}: expected {len(LAYER_CSV_COLUMNS)} fields, "
                f"got {len(fields)}"
            )
        name = fields[0].strip()
        try:
            nums = [int(f) for f in fields[1:]]
        except ValueError as exc:
            raise InputError(f"{source}:{lineno}: {exc}") from exc
        try:
            spec = ConvLayerSpec(
                name,
                *nums[:6],
                pad=tuple(nums[6:10]),
                stride=nums[10],
            )
            conv_output_shape(spec)
        except WinoconvError as exc:
            raise InputError(f"{source}:{lineno}: {exc}") from exc
        layers.append(spec)
    if not layers:
        raise InputError(f"{source}: no layer rows")
    return layers


def layer_inputs(
    spec: ConvLayerSpec, seed: int, layer_index: int, batch: int = 1
) -> tuple[Tensor4D, np.ndarray]:
    """Deterministic random input tensor and HWIO kernel for one layer."""
    rng = np.random.default_rng([seed, layer_index])
    x = tensor_new(
        (batch, spec.in_h, spec.in_w, spec.in_c),
        Layout.NHWC,
        rng.uniform(-1.0, 1.0, batch * spec.in_h * spec.in_w * spec.in_c).astype(
            np.float32
        ),
    )
    w = rng.uniform(-1.0, 1.0, (spec.k_h, spec.k_w, spec.in_c, spec.out_m)).astype(
        np.float32
    )
    return x, w


def _rel_err(got: Tensor4D, oracle: Tensor4D) -> float:
    denom = max(1.0, float(np.abs(oracle.data).max()))
    return float(np.abs(got.data - oracle.data).max()) / denom


def _median_ns(samples: Sequence[int]) -> int:
    return int(statistics.median(samples))


def run_layer_bench(
    spec: ConvLayerSpec,
    variants: Sequence[str],
    *,
    reps: int = 3,
    check: bool = False,
    threads: int = 1,
    seed: int = DEFAULT_SEED,
    layer_index: int = 0,
    config: GemmConfig = DEFAULT_CONFIG,
) -> list[BenchRecord]:
    """Measure one layer.  Returns the baseline record first, then one
    record per applicable fast variant in request order.  Variants that
    do not fit the layer are skipped without error.
    """
    if reps < 1:
        raise InputError(f"reps must be >= 1, got {reps}")
    x, w = layer_inputs(spec, seed, layer_index)
    oracle = direct_conv(x, w, spec) if check else None
    clock = time.perf_counter_ns

    wmat = np.ascontiguousarray(w.reshape(-1, spec.out_m))
    counter = MacCounter()
    lowered = im2row(x, spec)
    y = gemm(lowered.data, wmat, config=config, counter=counter)
    base_macs = counter.mac_count()
    oh, ow = conv_output_shape(spec)
    out = tensor_new((x.dims[0], oh, ow, spec.out_m), Layout.NHWC, y.reshape(-1))
    base_err = _rel_err(out, oracle) if oracle is not None else math.nan

    stage_in, stage_gemm, stage_out = [], [], []
    for _ in range(reps):
        t0 = clock()
        lowered = im2row(x, spec)
        t1 = clock()
        y = gemm(lowered.data, wmat, config=config)
        t2 = clock()
        out = tensor_new((x.dims[0], oh, ow, spec.out_m), Layout.NHWC, y.reshape(-1))
        t3 = clock()
        stage_in.append(t1 - t0)
        stage_gemm.append(t2 - t1)
        stage_out.append(t3 - t2)
    b_in, b_gemm, b_out = (
        _median_ns(stage_in),
        _median_ns(stage_gemm),
        _median_ns(stage_out),
    )
    base_total = b_in + b_gemm + b_out
    records = [
        BenchRecord(
            layer=spec.name,
            variant=BASELINE_VARIANT,
            t_in_ns=b_in,
            t_gemm_ns=b_gemm,
            t_out_ns=b_out,
            t_total_ns=base_total,
            macs=base_macs,
            max_rel_err=base_err,
            speedup=1.0,
        )
    ]

    for variant in variants:
        if variant == BASELINE_VARIANT or not variant_applies(variant, spec):
            continue
        m_h, m_w, _, _ = VARIANTS[variant]
        plan = build_plan(spec, m_h, m_w)
        wbatch = transform_weights(plan, w)
        counter = MacCounter()
        vbatch = transform_input(plan, x)
        products = batched_gemm(
            vbatch, wbatch, config=config, counter=counter, threads=threads
        )
        out = transform_output(plan, products)
        macs = counter.mac_count()
        err = _rel_err(out, oracle) if oracle is not None else math.nan

        stage_in, stage_gemm, stage_out = [], [], []
        for _ in range(reps):
            t0 = clock()
            vbatch = transform_input(plan, x)
            t1 = clock()
            products = batched_gemm(vbatch, wbatch, config=config, threads=threads)
            t2 = clock()
            out = transform_output(plan, products)
            t3 = clock()
            stage_in.append(t1 - t0)
            stage_gemm.append(t2 - t1)
            stage_out.append(t3 - t2)
        v_in, v_gemm, v_out = (
            _median_ns(stage_in),
            _median_ns(stage_gemm),
            _median_ns(stage_out),
        )
        total = v_in + v_gemm + v_out
        records.append(
            BenchRecord(
                layer=spec.name,
                variant=variant,
                t_in_ns=v_in,
                t_gemm_ns=v_gemm,
                t_out_ns=v_out,
                t_total_ns=total,
                macs=macs,
                max_rel_err=err,
                speedup=base_total / total if total else math.inf,
            )
        )
    return records


def run_network_bench(
    layers: Sequence[ConvLayerSpec],
    variants: Sequence[str],
    *,
    scale: int = 1,
    reps: int = 3,
    check: bool = False,
    threads: int = 1,
    seed: int = DEFAULT_SEED,
    config: GemmConfig = DEFAULT_CONFIG,
) -> list[BenchRecord]:
    records = []
    for index, layer in enumerate(layers):
        spec = scale_layer(layer, scale)
        records.extend(
            run_layer_bench(
                spec,
                variants,
                reps=reps,
                check=check,
                threads=threads,
                seed=seed,
                layer_index=index,
                config=config,
            )
        )
    return records


def _fmt_err(v: float) -> str:
    return "nan" if math.isnan(v) else f"{v:.3e}"


def _fmt_speedup(v: float) -> str:
    return f"{v:.6f}"


def best_fast_records(records: Sequence[BenchRecord]) -> dict[str, BenchRecord]:
    """Per layer, the fast-variant record with the fewest multiplies.

    MAC count (not wall time) picks the winner so the selection is
    deterministic run to run.
    """
    best: dict[str, BenchRecord] = {}
    for rec in records:
        if rec.variant == BASELINE_VARIANT:
            continue
        cur = best.get(rec.layer)
        if cur is None or rec.macs < cur.macs:
            best[rec.layer] = rec
    return best


def aggregate_records(records: Sequence[BenchRecord]) -> list[BenchRecord]:
    """TOTAL rows over the fast layers: baseline scheme, best fast
    scheme, and a percentage-improvement row whose speedup column holds
    100 * (baseline - fast) / baseline.  Empty when nothing fast ran.
    """
    best = best_fast_records(records)
    if not best:
        return []
    base_by_layer = {
        r.layer: r for r in records if r.variant == BASELINE_VARIANT
    }
    fast_layers = [
        r.layer for r in records if r.variant == BASELINE_VARIANT and r.layer in best
    ]

    def total(rows: list[BenchRecord], variant: str, speedup: float) -> BenchRecord:
        errs = [r.max_rel_err for r in rows]
        err = math.nan if any(math.isnan(e) for e in errs) else max(errs)
        return BenchRecord(
            layer="TOTAL",
            variant=variant,
            t_in_ns=sum(r.t_in_ns for r in rows),
            t_gemm_ns=sum(r.t_gemm_ns for r in rows),
            t_out_ns=sum(r.t_out_ns for r in rows),
            t_total_ns=sum(r.t_total_ns for r in rows),
            macs=sum(r.macs for r in rows),
            max_rel_err=err,
            speedup=speedup,
        )

    base_rows = [base_by_layer[name] for name in fast_layers]
    fast_rows = [best[name] for name in fast_layers]
    base_ns = sum(r.t_total_ns for r in base_rows)
    fast_ns = sum(r.t_total_ns for r in fast_rows)
    speedup = base_ns / fast_ns if fast_ns else math.inf
    pct = 100.0 * (base_ns - fast_ns) / base_ns if base_ns else math.nan
    return [
        total(base_rows, BASELINE_VARIANT, 1.0),
        total(fast_rows, "fast_best", speedup),
        BenchRecord(
            layer="TOTAL",
            variant="improvement_pct",
            t_in_ns=0,
            t_gemm_ns=0,
            t_out_ns=0,
            t_total_ns=0,
            macs=0,
            max_rel_err=math.nan,
            speedup=pct,
        ),
    ]


def _record_cells(rec: BenchRecord) -> list[str]:
    return [
        rec.layer,
        rec.variant,
        str(rec.t_in_ns),
        str(rec.t_gemm_ns),
        str(rec.t_out_ns),
        str(rec.t_total_ns),
        str(rec.macs),
        _fmt_err(rec.max_rel_err),
        _fmt_speedup(rec.speedup),
    ]


def emit_report(records: Sequence[BenchRecord], fmt: str = "csv") -> str:
    """Render records plus aggregate rows as csv or a markdown table."""
    if not records:
        raise InputError("no benchmark records to report")
    if fmt not in ("csv", "md"):
        raise InputError(f"unknown report format {fmt!r}")
    rows = [_record_cells(r) for r in [*records, *aggregate_records(records)]]
    if fmt == "csv":
        lines = [",".join(REPORT_COLUMNS)]
        lines.extend(",".join(cells) for cells in rows)
    else:
        lines = [
            "| " + " | ".join(REPORT_COLUMNS) + " |",
            "|" + "|".join(" --- " for _ in REPORT_COLUMNS) + "|",
        ]
        lines.extend("| " + " | ".join(cells) + " |" for cells in rows)
    return "\n".join(lines) + "\n"


def check_violations(records: Sequence[BenchRecord]) -> list[str]:
    """Human-readable message per record that breaks its tolerance."""
    msgs = []
    for rec in records:
        if rec.layer == "TOTAL" or math.isnan(rec.max_rel_err):
            continue
        tol = variant_tolerance(rec.variant)
        if rec.max_rel_err > tol:
            msgs.append(
                f"{rec.layer}/{rec.variant}: max_rel_err {rec.max_rel_err:.3e} "
                f"exceeds {tol:.1e}"
            )
    return msgs
