"""Fast CNN convolution via short-convolution transforms, with exact
transform generation, an im2row baseline, and a benchmark CLI.
"""

from .baselines import LoweredMatrix, direct_conv, im2row, im2row_conv, im2row_mac_count
from .bench import (
    BenchRecord,
    VARIANTS,
    emit_report,
    load_layer_table,
    run_layer_bench,
    run_network_bench,
)
from .engine import (
    TileMatrixBatch,
    WinogradPlan,
    batched_gemm,
    build_plan,
    convolve,
    transform_input,
    transform_output,
    transform_weights,
)
from .errors import (
    ArityError,
    ConstructionError,
    InputError,
    LayoutError,
    ShapeError,
    SizeError,
    UnsupportedVariantError,
    WinoconvError,
)
from .gemm import DEFAULT_CONFIG, GemmConfig, MacCounter, gemm
from .tensor import (
    ConvLayerSpec,
    Layout,
    Tensor4D,
    conv_output_shape,
    convert_layout,
    extract_region,
    read_tensor,
    tensor_new,
    write_tensor,
)
from .transforms import (
    TransformSet,
    VerificationReport,
    default_points,
    format_transform_set,
    generate_1d,
    verify_transform_set,
)

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "BenchRecord",
    "ConstructionError",
    "ConvLayerSpec",
    "DEFAULT_CONFIG",
    "GemmConfig",
    "InputError",
    "Layout",
    "LayoutError",
    "LoweredMatrix",
    "MacCounter",
    "ShapeError",
    "SizeError",
    "Tensor4D",
    "TileMatrixBatch",
    "TransformSet",
    "UnsupportedVariantError",
    "VARIANTS",
    "VerificationReport",
    "WinogradPlan",
    "WinoconvError",
    "batched_gemm",
    "build_plan",
    "conv_output_shape",
    "convert_layout",
    "convolve",
    "default_points",
    "direct_conv",
    "emit_report",
    "extract_region",
    "format_transform_set",
    "gemm",
    "generate_1d",
    "im2row",
    "im2row_conv",
    "im2row_mac_count",
    "load_layer_table",
    "read_tensor",
    "run_layer_bench",
    "run_network_bench",
    "tensor_new",
    "transform_input",
    "transform_output",
    "transform_weights",
    "verify_transform_set",
    "write_tensor",
]
